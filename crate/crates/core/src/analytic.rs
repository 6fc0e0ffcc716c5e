//! Analytic EAM functions used to generate the bundled setfl tables.
//!
//! The functional form is the Zhou–Johnson–Wadley parameterization (exponential
//! pair and density terms with rational screening, piecewise embedding energy).
//! Pair and density functions are multiplied by a C² smoothstep taper so they
//! reach zero, with zero slope and curvature, exactly at the cutoff.

use crate::eam::EamTables;
use crate::error::Result;
use crate::spline::{Beyond, TabulatedFunction};

#[derive(Debug, Clone)]
pub struct AnalyticEam {
    pub element: &'static str,
    pub atomic_number: u32,
    pub mass: f64,
    pub re: f64,
    pub fe: f64,
    pub rho_e: f64,
    pub rho_s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub f_low: [f64; 4],
    pub f_mid: [f64; 4],
    pub eta: f64,
    pub f_e: f64,
    pub taper_start: f64,
    pub cutoff: f64,
}

/// Sampling grid for a setfl file.
#[derive(Debug, Clone, Copy)]
pub struct TableGrid {
    pub n_rho: usize,
    pub d_rho: f64,
    pub n_r: usize,
    pub d_r: f64,
}

pub const TANTALUM: AnalyticEam = AnalyticEam {
    element: "Ta",
    atomic_number: 73,
    mass: 180.9479,
    re: 2.860082,
    fe: 3.086341,
    rho_e: 33.787168,
    rho_s: 33.787168,
    alpha: 8.489528,
    beta: 4.527748,
    a: 0.611679,
    b: 1.032101,
    kappa: 0.176977,
    lambda: 0.353954,
    f_low: [-5.103845, -0.405524, 1.112997, -3.585325],
    f_mid: [-5.14, 0.0, 1.640098, 0.221375],
    eta: 0.848843,
    f_e: -5.141526,
    taper_start: 3.6,
    cutoff: 4.1,
};

pub const TUNGSTEN: AnalyticEam = AnalyticEam {
    element: "W",
    atomic_number: 74,
    mass: 183.84,
    re: 2.740840,
    fe: 3.487340,
    rho_e: 37.234847,
    rho_s: 37.234847,
    alpha: 8.900114,
    beta: 4.746728,
    a: 0.882435,
    b: 1.394592,
    kappa: 0.139209,
    lambda: 0.278417,
    f_low: [-4.946281, -0.148818, 0.365057, -4.432406],
    f_mid: [-4.96, 0.0, 0.661935, 0.348147],
    eta: -0.582714,
    f_e: -4.961306,
    taper_start: 5.3,
    cutoff: 5.8,
};

impl TableGrid {
    pub const TANTALUM: TableGrid = TableGrid {
        n_rho: 2001,
        d_rho: 0.05,
        n_r: 2101,
        d_r: 0.002,
    };
    pub const TUNGSTEN: TableGrid = TableGrid {
        n_rho: 2001,
        d_rho: 0.05,
        n_r: 3001,
        d_r: 0.002,
    };
}

fn taper(r: f64, start: f64, end: f64) -> f64 {
    if r <= start {
        1.0
    } else if r >= end {
        0.0
    } else {
        let t = (r - start) / (end - start);
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

impl AnalyticEam {
    fn screened(&self, r: f64, amp: f64, decay: f64, shift: f64) -> f64 {
        let x = r / self.re;
        amp * (-decay * (x - 1.0)).exp() / (1.0 + (x - shift).powi(20))
    }

    pub fn phi(&self, r: f64) -> f64 {
        let raw = self.screened(r, self.a, self.alpha, self.kappa)
            - self.screened(r, self.b, self.beta, self.lambda);
        raw * taper(r, self.taper_start, self.cutoff)
    }

    pub fn density(&self, r: f64) -> f64 {
        self.screened(r, self.fe, self.beta, self.lambda) * taper(r, self.taper_start, self.cutoff)
    }

    pub fn embed(&self, rho: f64) -> f64 {
        let rho_n = 0.85 * self.rho_e;
        let rho_o = 1.15 * self.rho_e;
        let poly = |c: &[f64; 4], x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        if rho < rho_n {
            poly(&self.f_low, rho / rho_n - 1.0)
        } else if rho < rho_o {
            poly(&self.f_mid, rho / self.rho_e - 1.0)
        } else {
            let s = (rho / self.rho_s).powf(self.eta);
            self.f_e * (1.0 - s.ln()) * s
        }
    }

    /// Samples the analytic functions onto `grid`, then sets the header lattice
    /// constant to the BCC equilibrium of the tabulated potential.
    pub fn tabulate(&self, grid: TableGrid) -> Result<EamTables> {
        let f: Vec<f64> = (0..grid.n_rho).map(|i| self.embed(i as f64 * grid.d_rho)).collect();
        let rho: Vec<f64> = (0..grid.n_r).map(|i| self.density(i as f64 * grid.d_r)).collect();
        let rphi: Vec<f64> = (0..grid.n_r)
            .map(|i| {
                let r = i as f64 * grid.d_r;
                r * self.phi(r)
            })
            .collect();
        let mut tables = EamTables::new(
            TabulatedFunction::new(rphi, grid.d_r, Beyond::Zero)?,
            TabulatedFunction::new(rho, grid.d_r, Beyond::Zero)?,
            TabulatedFunction::new(f, grid.d_rho, Beyond::Clamp)?,
            self.cutoff,
        )?;
        tables.element = self.element.to_string();
        tables.atomic_number = self.atomic_number;
        tables.species_mass = self.mass;
        tables.lattice_type = "bcc".to_string();
        tables.comments = [
            format!("{} EAM, Zhou-Johnson-Wadley functional form", self.element),
            format!(
                "pair and density tapered to zero over [{}, {}] A",
                self.taper_start, self.cutoff
            ),
            "lattice constant: BCC equilibrium of the tabulated potential".to_string(),
        ];
        tables.lattice_constant = bcc_equilibrium_lattice(&tables, 2.0 * self.re / 3f64.sqrt())?;
        Ok(tables)
    }
}

/// Cohesive energy per atom of an infinite BCC crystal with lattice constant `a`.
pub fn bcc_energy_per_atom(tables: &EamTables, a: f64) -> Result<f64> {
    let n = (tables.cutoff / a).ceil() as i64 + 1;
    let mut rho = 0.0;
    let mut pair = 0.0;
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                for basis in [0.0, 0.5] {
                    let d = [
                        (i as f64 + basis) * a,
                        (j as f64 + basis) * a,
                        (k as f64 + basis) * a,
                    ];
                    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                    if r < 1e-9 || r >= tables.cutoff {
                        continue;
                    }
                    let t = tables.pair_terms(r)?;
                    rho += t.rho;
                    pair += t.phi;
                }
            }
        }
    }
    Ok(tables.embedding(rho)?.0 + 0.5 * pair)
}

/// Golden-section minimum of the BCC cohesive energy near `guess`.
pub fn bcc_equilibrium_lattice(tables: &EamTables, guess: f64) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.9 * guess, 1.1 * guess);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = bcc_energy_per_atom(tables, x1)?;
    let mut f2 = bcc_energy_per_atom(tables, x2)?;
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = bcc_energy_per_atom(tables, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = bcc_energy_per_atom(tables, x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}
