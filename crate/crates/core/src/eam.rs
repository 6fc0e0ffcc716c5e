//! Tabulated embedded-atom potentials: setfl I/O and the pair/embedding kernels.
//!
//! The energy of `N` atoms is
//!
//! ```text
//! U = sum_i [ sum_{j>i} phi(r_ij) + F( sum_{j != i} rho(r_ij) ) ]
//! ```
//!
//! with `phi` and `rho` vanishing beyond the cutoff. Tables follow the DYNAMO
//! setfl layout for a single element: `F` sampled on a density grid, `rho` and
//! `r * phi` sampled on a distance grid.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::{Beyond, TabulatedFunction};

/// Pairs closer than this are treated as coincident.
pub const MIN_SEPARATION: f64 = 0.1;

/// Floating-point width used by the force kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// Every kernel result is rounded to IEEE binary32, mirroring FP32 hardware.
    Single,
}

impl Precision {
    #[inline]
    pub fn round(self, x: f64) -> f64 {
        match self {
            Precision::Double => x,
            Precision::Single => x as f32 as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerms {
    pub phi: f64,
    pub dphi_dr: f64,
    pub rho: f64,
    pub drho_dr: f64,
}

impl PairTerms {
    const ZERO: PairTerms = PairTerms {
        phi: 0.0,
        dphi_dr: 0.0,
        rho: 0.0,
        drho_dr: 0.0,
    };
}

#[derive(Debug, Clone)]
pub struct EamTables {
    /// `r * phi(r)` in eV·Å.
    pub phi: TabulatedFunction,
    pub rho: TabulatedFunction,
    pub embed: TabulatedFunction,
    pub cutoff: f64,
    pub lattice_constant: f64,
    pub species_mass: f64,
    pub element: String,
    pub atomic_number: u32,
    pub lattice_type: String,
    pub comments: [String; 3],
}

impl EamTables {
    pub fn new(
        phi: TabulatedFunction,
        rho: TabulatedFunction,
        embed: TabulatedFunction,
        cutoff: f64,
    ) -> Result<Self> {
        if !(cutoff > 0.0) {
            return Err(Error::Domain(format!("cutoff must be > 0, got {cutoff}")));
        }
        if cutoff > rho.count() as f64 * rho.spacing() {
            return Err(Error::Domain(format!(
                "cutoff {cutoff} exceeds the density table extent {}",
                rho.count() as f64 * rho.spacing()
            )));
        }
        Ok(Self {
            phi,
            rho,
            embed,
            cutoff,
            lattice_constant: 0.0,
            species_mass: 0.0,
            element: String::new(),
            atomic_number: 0,
            lattice_type: String::new(),
            comments: Default::default(),
        })
    }

    /// Pair energy, density contribution and their radial derivatives.
    pub fn pair_terms(&self, r: f64) -> Result<PairTerms> {
        if !(r >= MIN_SEPARATION) {
            return Err(Error::Domain(format!(
                "coincident atoms: separation {r} Å is below {MIN_SEPARATION} Å"
            )));
        }
        if r >= self.cutoff {
            return Ok(PairTerms::ZERO);
        }
        let (z, dz) = self.phi.eval(r)?;
        let (rho, drho_dr) = self.rho.eval(r)?;
        let phi = z / r;
        Ok(PairTerms {
            phi,
            dphi_dr: (dz - phi) / r,
            rho,
            drho_dr,
        })
    }

    pub fn pair_terms_in(&self, r: f64, precision: Precision) -> Result<PairTerms> {
        let t = self.pair_terms(precision.round(r))?;
        Ok(PairTerms {
            phi: precision.round(t.phi),
            dphi_dr: precision.round(t.dphi_dr),
            rho: precision.round(t.rho),
            drho_dr: precision.round(t.drho_dr),
        })
    }

    /// Embedding energy `F` and `dF/drho`.
    pub fn embedding(&self, rho_total: f64) -> Result<(f64, f64)> {
        if !(rho_total >= 0.0) {
            return Err(Error::Domain(format!("negative electron density {rho_total}")));
        }
        self.embed.eval(rho_total)
    }

    pub fn embedding_in(&self, rho_total: f64, precision: Precision) -> Result<(f64, f64)> {
        let (f, df) = self.embedding(precision.round(rho_total))?;
        Ok((precision.round(f), precision.round(df)))
    }

    /// Reads a single-element DYNAMO setfl file.
    pub fn load_setfl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_setfl(&text, &path.display().to_string())
    }

    pub fn parse_setfl(text: &str, origin: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let err = |line: usize, msg: String| Error::parse(origin, line, msg);
        if lines.len() < 6 {
            return Err(err(
                lines.len().max(1),
                "file ends before the setfl header is complete".into(),
            ));
        }
        let comments = [
            lines[0].trim_end().to_string(),
            lines[1].trim_end().to_string(),
            lines[2].trim_end().to_string(),
        ];

        let elements: Vec<&str> = lines[3].split_whitespace().collect();
        let n_elements: usize = elements
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(4, "expected element count".into()))?;
        if n_elements != 1 {
            return Err(err(
                4,
                format!("multi-element unsupported ({n_elements} elements)"),
            ));
        }
        let element = elements
            .get(1)
            .ok_or_else(|| err(4, "missing element name".into()))?
            .to_string();

        let grid: Vec<&str> = lines[4].split_whitespace().collect();
        if grid.len() < 5 {
            return Err(err(5, "expected Nrho drho Nr dr cutoff".into()));
        }
        let n_rho: usize = parse_num(grid[0], 5, origin)?;
        let d_rho: f64 = parse_num(grid[1], 5, origin)?;
        let n_r: usize = parse_num(grid[2], 5, origin)?;
        let d_r: f64 = parse_num(grid[3], 5, origin)?;
        let cutoff: f64 = parse_num(grid[4], 5, origin)?;

        let species: Vec<&str> = lines[5].split_whitespace().collect();
        if species.len() < 3 {
            return Err(err(6, "expected atomic number, mass, lattice constant".into()));
        }
        let atomic_number: u32 = parse_num(species[0], 6, origin)?;
        let mass: f64 = parse_num(species[1], 6, origin)?;
        let lattice_constant: f64 = parse_num(species[2], 6, origin)?;
        let lattice_type = species.get(3).copied().unwrap_or("").to_string();

        let mut body = Tokens::new(&lines, 6, origin);
        let f_values = body.take(n_rho, "F")?;
        let rho_values = body.take(n_r, "rho")?;
        let phi_values = body.take(n_r, "r*phi")?;

        let embed = TabulatedFunction::new(f_values, d_rho, Beyond::Clamp)
            .map_err(|e| err(5, e.to_string()))?;
        let rho = TabulatedFunction::new(rho_values, d_r, Beyond::Zero)
            .map_err(|e| err(5, e.to_string()))?;
        let phi = TabulatedFunction::new(phi_values, d_r, Beyond::Zero)
            .map_err(|e| err(5, e.to_string()))?;
        let mut tables = EamTables::new(phi, rho, embed, cutoff).map_err(|e| err(5, e.to_string()))?;
        tables.lattice_constant = lattice_constant;
        tables.species_mass = mass;
        tables.element = element;
        tables.atomic_number = atomic_number;
        tables.lattice_type = lattice_type;
        tables.comments = comments;
        Ok(tables)
    }

    /// Renders the tables in setfl layout, five values per line.
    pub fn to_setfl(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "{c}");
        }
        let _ = writeln!(out, "1 {}", self.element);
        let _ = writeln!(
            out,
            "{} {:.16e} {} {:.16e} {:.16e}",
            self.embed.count(),
            self.embed.spacing(),
            self.rho.count(),
            self.rho.spacing(),
            self.cutoff
        );
        let _ = writeln!(
            out,
            "{} {:.6} {:.10} {}",
            self.atomic_number, self.species_mass, self.lattice_constant, self.lattice_type
        );
        for table in [&self.embed, &self.rho, &self.phi] {
            for chunk in table.samples().chunks(5) {
                let row: Vec<String> = chunk.iter().map(|v| format!("{v:.16e}")).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }

    pub fn write_setfl(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_setfl()).map_err(|e| Error::io(path, e))
    }
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, origin: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(origin, line, format!("cannot parse number {token:?}")))
}

/// Whitespace-separated numbers spanning lines, remembering where each came from.
struct Tokens<'a> {
    lines: &'a [&'a str],
    next_line: usize,
    pending: std::vec::IntoIter<&'a str>,
    current_line: usize,
    origin: &'a str,
}

impl<'a> Tokens<'a> {
    fn new(lines: &'a [&'a str], start: usize, origin: &'a str) -> Self {
        Self {
            lines,
            next_line: start,
            pending: Vec::new().into_iter(),
            current_line: start,
            origin,
        }
    }

    fn next_token(&mut self) -> Option<&'a str> {
        loop {
            if let Some(t) = self.pending.next() {
                return Some(t);
            }
            let line = self.lines.get(self.next_line)?;
            self.next_line += 1;
            self.current_line = self.next_line;
            self.pending = line.split_whitespace().collect::<Vec<_>>().into_iter();
        }
    }

    fn take(&mut self, count: usize, block: &str) -> Result<Vec<f64>> {
        let mut values = Vec::with_capacity(count);
        while values.len() < count {
            match self.next_token() {
                Some(tok) => values.push(parse_num(tok, self.current_line, self.origin)?),
                None => {
                    return Err(Error::parse(
                        self.origin,
                        self.current_line,
                        format!(
                            "{block} block truncated: expected {count} values, found {}",
                            values.len()
                        ),
                    ))
                }
            }
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_setfl(n_elements: usize, f_values: usize) -> String {
        let mut s = String::from("c1\nc2\nc3\n");
        s += &format!("{n_elements} Xx\n");
        s += "4 1.0 5 1.0 3.5\n";
        s += "10 50.0 3.0 bcc\n";
        let f: Vec<String> = (0..f_values).map(|i| format!("{}", -(i as f64))).collect();
        s += &f.join(" ");
        s += "\n0.5 0.4 0.3 0.2 0.1\n";
        s += "0 4 2 1 0.5\n";
        s
    }

    #[test]
    fn parses_toy_file() {
        let t = EamTables::parse_setfl(&toy_setfl(1, 4), "toy").unwrap();
        assert_eq!(t.cutoff, 3.5);
        assert_eq!(t.element, "Xx");
        assert_eq!(t.lattice_constant, 3.0);
        assert_eq!(t.embed.samples(), &[0.0, -1.0, -2.0, -3.0]);
        assert_eq!(t.embedding(0.0).unwrap().0, 0.0);
        assert_eq!(t.embedding(2.0).unwrap().0, -2.0);
    }

    #[test]
    fn rejects_multi_element() {
        let e = EamTables::parse_setfl(&toy_setfl(2, 4), "toy").unwrap_err();
        assert!(e.to_string().contains("multi-element unsupported"), "{e}");
        assert!(matches!(e, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn truncated_block_names_line() {
        let text = "c1\nc2\nc3\n1 Xx\n4 1.0 5 1.0 3.5\n10 50.0 3.0 bcc\n0 -1 -2\n";
        let e = EamTables::parse_setfl(text, "toy").unwrap_err();
        match e {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 7);
                assert!(msg.contains("F block truncated"), "{msg}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_number_names_line() {
        let text = toy_setfl(1, 4).replace("0.4", "zero");
        let e = EamTables::parse_setfl(&text, "toy").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 8, .. }), "{e}");
    }

    #[test]
    fn pair_guard_and_cutoff() {
        let t = EamTables::parse_setfl(&toy_setfl(1, 4), "toy").unwrap();
        assert!(matches!(t.pair_terms(1e-12), Err(Error::Domain(_))));
        let z = t.pair_terms(3.5).unwrap();
        assert_eq!((z.phi, z.dphi_dr, z.rho, z.drho_dr), (0.0, 0.0, 0.0, 0.0));
        assert!(t.embedding(-1.0).is_err());
    }

    #[test]
    fn setfl_text_round_trips() {
        let t = EamTables::parse_setfl(&toy_setfl(1, 4), "toy").unwrap();
        let again = EamTables::parse_setfl(&t.to_setfl(), "again").unwrap();
        assert_eq!(again.phi.samples(), t.phi.samples());
        assert_eq!(again.embed.samples(), t.embed.samples());
        assert_eq!(again.cutoff, t.cutoff);
    }
}
