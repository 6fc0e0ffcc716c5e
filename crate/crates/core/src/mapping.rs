//! Atom-to-core placement on the logical 2D mesh.
//!
//! Atoms are projected onto the x-y plane and binned into square cells of a
//! configurable width. Every cell owns an `nx × ny` rectangle of cores. Owner
//! cores sit on diagonals `(col + row) % s == 0` with stride `s = max(h + 1, k)`,
//! and each owner's group is itself plus the `k - 1` empty cores to its east.
//! Within a rectangle the atoms of one cell are ordered by `(z, y, x, id)` and
//! dealt onto the owner slots in row-major order, so each z-column spreads over
//! its rectangle.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::system::{AtomSystem, Vec3};

const NONE: u32 = u32::MAX;

/// Smallest cost decrease (Å²) that counts as a beneficial swap.
pub const REMAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Core {
    pub col: usize,
    pub row: usize,
}

impl Core {
    pub fn new(col: usize, row: usize) -> Self {
        Core { col, row }
    }

    /// Row-major index on a grid of the given width.
    pub fn linear(self, width: usize) -> usize {
        self.row * width + self.col
    }

    /// Mesh (Chebyshev) distance.
    pub fn chebyshev(self, other: Core) -> usize {
        self.col.abs_diff(other.col).max(self.row.abs_diff(other.row))
    }
}

impl fmt::Display for Core {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreGrid {
    pub width: usize,
    pub height: usize,
    /// `k`
    pub cores_per_atom: usize,
    /// `h`, the number of empty diagonals between occupied ones.
    pub diagonal_spacing: usize,
}

impl CoreGrid {
    pub const WSE_WIDTH: usize = 920;
    pub const WSE_HEIGHT: usize = 920;

    /// `h = None` picks `k - 1`, the spacing that exactly fits each group
    /// between consecutive occupied diagonals.
    pub fn new(width: usize, height: usize, cores_per_atom: usize, diagonal_spacing: Option<usize>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Config(format!("grid must be non-empty, got {width}x{height}")));
        }
        if cores_per_atom == 0 {
            return Err(Error::Config("cores_per_atom must be >= 1".into()));
        }
        if cores_per_atom > width {
            return Err(Error::Config(format!(
                "cores_per_atom {cores_per_atom} exceeds grid width {width}"
            )));
        }
        Ok(CoreGrid {
            width,
            height,
            cores_per_atom,
            diagonal_spacing: diagonal_spacing.unwrap_or(cores_per_atom - 1),
        })
    }

    /// The 920×920 mesh.
    pub fn wse(cores_per_atom: usize) -> Result<Self> {
        Self::new(Self::WSE_WIDTH, Self::WSE_HEIGHT, cores_per_atom, None)
    }

    /// Column distance between consecutive owner cores in a row.
    pub fn stride(&self) -> usize {
        (self.diagonal_spacing + 1).max(self.cores_per_atom)
    }

    pub fn contains(&self, c: Core) -> bool {
        c.col < self.width && c.row < self.height
    }

    pub fn is_owner_slot(&self, c: Core) -> bool {
        self.contains(c) && (c.col + c.row).is_multiple_of(self.stride()) && c.col + self.cores_per_atom <= self.width
    }

    /// Number of owner slots on the whole grid.
    pub fn capacity(&self) -> usize {
        let s = self.stride();
        let last = self.width - self.cores_per_atom;
        (0..self.height)
            .map(|row| {
                let first = (s - row % s) % s;
                if first > last {
                    0
                } else {
                    (last - first) / s + 1
                }
            })
            .sum()
    }

    pub fn linear(&self, c: Core) -> usize {
        c.linear(self.width)
    }

    pub fn group(&self, owner: Core) -> impl Iterator<Item = Core> {
        (0..self.cores_per_atom).map(move |j| Core::new(owner.col + j, owner.row))
    }
}

/// Projected-plane cell geometry and the core rectangle each cell owns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLayout {
    /// Å, lower-left corner of cell (0, 0)
    pub origin: [f64; 2],
    /// Å
    pub cell_width: f64,
    pub cells_x: usize,
    pub cells_y: usize,
    /// `nx`, a multiple of the grid stride
    pub rect_w: usize,
    /// `ny`
    pub rect_h: usize,
}

impl CellLayout {
    pub fn center(&self, cell: (usize, usize)) -> [f64; 2] {
        [
            self.origin[0] + (cell.0 as f64 + 0.5) * self.cell_width,
            self.origin[1] + (cell.1 as f64 + 0.5) * self.cell_width,
        ]
    }

    /// `[x_lo, x_hi, y_lo, y_hi]`
    pub fn bounds(&self, cell: (usize, usize)) -> [f64; 4] {
        let x0 = self.origin[0] + cell.0 as f64 * self.cell_width;
        let y0 = self.origin[1] + cell.1 as f64 * self.cell_width;
        [x0, x0 + self.cell_width, y0, y0 + self.cell_width]
    }

    pub fn cell_of_core(&self, c: Core) -> (usize, usize) {
        (c.col / self.rect_w, c.row / self.rect_h)
    }

    /// Core columns and rows covered by all rectangles.
    pub fn extent(&self) -> (usize, usize) {
        (self.cells_x * self.rect_w, self.cells_y * self.rect_h)
    }

    fn cell_of_point(&self, x: f64, y: f64) -> (usize, usize) {
        let ix = ((x - self.origin[0]) / self.cell_width).floor().max(0.0) as usize;
        let iy = ((y - self.origin[1]) / self.cell_width).floor().max(0.0) as usize;
        (ix.min(self.cells_x - 1), iy.min(self.cells_y - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemapOutcome {
    pub swaps: Vec<(Core, Core)>,
    /// Å²
    pub cost_before: f64,
    /// Å²
    pub cost_after: f64,
}

/// Mesh distances that bound the owner-core offset of any pair within reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalityBound {
    /// Max column offset.
    pub horizontal: usize,
    /// Max row offset.
    pub vertical: usize,
    /// Å, furthest any atom sits outside its owner cell along x and y.
    pub excursion: [f64; 2],
    /// Å
    pub reach: f64,
}

#[derive(Debug, Clone)]
pub struct Placement {
    grid: CoreGrid,
    layout: CellLayout,
    slots: Vec<Core>,
    /// Region-dense core index to slot, `NONE` where the core is not an owner slot.
    slot_at: Vec<u32>,
    atom_slot: Vec<u32>,
    slot_atom: Vec<u32>,
}

/// Cheapest `nx × ny` rectangle with `nx` a multiple of `stride` and at least
/// `m` owner slots: minimal area, then most square, then narrowest.
fn choose_rect(m: usize, stride: usize) -> (usize, usize) {
    let m = m.max(1);
    let mut best: Option<(usize, usize, usize, usize)> = None;
    for p in 1..=m {
        let q = m.div_ceil(p);
        let (nx, ny) = (stride * p, q);
        let key = (nx * ny, nx.abs_diff(ny), nx, ny);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    let b = best.unwrap();
    (b.2, b.3)
}

/// Projects `system` onto the plane and places each atom on an owner core.
pub fn project_and_place(system: &AtomSystem, grid: CoreGrid, cell_width: f64) -> Result<Placement> {
    if !(cell_width > 0.0) {
        return Err(Error::Config(format!("cell width must be > 0, got {cell_width}")));
    }
    let n = system.len();
    let capacity = grid.capacity();
    if n > capacity {
        return Err(Error::Capacity {
            needed: n,
            max_atoms: capacity,
        });
    }
    let pos = &system.positions;
    let (mut lo, mut hi) = ([0.0f64; 2], [0.0f64; 2]);
    if n > 0 {
        lo = [f64::INFINITY; 2];
        hi = [f64::NEG_INFINITY; 2];
        for p in pos {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
    }
    let origin = [lo[0] - 0.25 * cell_width, lo[1] - 0.25 * cell_width];
    let cells_x = ((hi[0] - origin[0]) / cell_width).floor() as usize + 1;
    let cells_y = ((hi[1] - origin[1]) / cell_width).floor() as usize + 1;
    let mut layout = CellLayout {
        origin,
        cell_width,
        cells_x,
        cells_y,
        rect_w: grid.stride(),
        rect_h: 1,
    };

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); cells_x * cells_y];
    for (i, p) in pos.iter().enumerate() {
        let (ix, iy) = layout.cell_of_point(p[0], p[1]);
        members[iy * cells_x + ix].push(i as u32);
    }
    let m = members.iter().map(Vec::len).max().unwrap_or(0);
    let (rect_w, rect_h) = choose_rect(m, grid.stride());
    layout.rect_w = rect_w;
    layout.rect_h = rect_h;

    let (ew, eh) = layout.extent();
    let need_w = ew + grid.cores_per_atom - 1;
    if need_w > grid.width || eh > grid.height {
        return Err(Error::LayoutDoesNotFit {
            need_w,
            need_h: eh,
            width: grid.width,
            height: grid.height,
        });
    }

    let mut slots = Vec::new();
    let mut slot_at = vec![NONE; ew * eh];
    for row in 0..eh {
        for col in 0..ew {
            let c = Core::new(col, row);
            if grid.is_owner_slot(c) {
                slot_at[row * ew + col] = slots.len() as u32;
                slots.push(c);
            }
        }
    }

    let mut atom_slot = vec![NONE; n];
    let mut slot_atom = vec![NONE; slots.len()];
    for iy in 0..cells_y {
        for ix in 0..cells_x {
            let atoms = &mut members[iy * cells_x + ix];
            atoms.sort_by(|&a, &b| {
                let (pa, pb) = (&pos[a as usize], &pos[b as usize]);
                pa[2].total_cmp(&pb[2])
                    .then(pa[1].total_cmp(&pb[1]))
                    .then(pa[0].total_cmp(&pb[0]))
                    .then(a.cmp(&b))
            });
            let rect_slots = (iy * rect_h..(iy + 1) * rect_h).flat_map(|row| {
                (ix * rect_w..(ix + 1) * rect_w).map(move |col| row * ew + col)
            });
            let mut dealt = rect_slots.filter_map(|idx| match slot_at[idx] {
                NONE => None,
                s => Some(s),
            });
            for &a in atoms.iter() {
                let s = dealt.next().expect("rectangle holds at least m slots");
                atom_slot[a as usize] = s;
                slot_atom[s as usize] = a;
            }
        }
    }

    Ok(Placement {
        grid,
        layout,
        slots,
        slot_at,
        atom_slot,
        slot_atom,
    })
}

impl Placement {
    pub fn grid(&self) -> &CoreGrid {
        &self.grid
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    /// Number of placed atoms.
    pub fn len(&self) -> usize {
        self.atom_slot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atom_slot.is_empty()
    }

    /// Owner slots inside the layout, in ascending linear core index.
    pub fn slots(&self) -> &[Core] {
        &self.slots
    }

    pub fn owner(&self, atom: usize) -> Core {
        self.slots[self.atom_slot[atom] as usize]
    }

    pub fn owners(&self) -> Vec<Core> {
        (0..self.len()).map(|a| self.owner(a)).collect()
    }

    pub fn group(&self, atom: usize) -> Vec<Core> {
        self.grid.group(self.owner(atom)).collect()
    }

    /// Nominal projected-plane region of an owner core's cell.
    pub fn cell_bounds(&self, core: Core) -> [f64; 4] {
        self.layout.bounds(self.layout.cell_of_core(core))
    }

    pub fn atom_at(&self, core: Core) -> Option<usize> {
        let s = self.slot_index(core)?;
        match self.slot_atom[s] {
            NONE => None,
            a => Some(a as usize),
        }
    }

    fn slot_index(&self, core: Core) -> Option<usize> {
        let (ew, eh) = self.layout.extent();
        if core.col >= ew || core.row >= eh {
            return None;
        }
        match self.slot_at[core.row * ew + core.col] {
            NONE => None,
            s => Some(s as usize),
        }
    }

    fn atom_cost(&self, p: &Vec3, slot: usize) -> f64 {
        let c = self.layout.center(self.layout.cell_of_core(self.slots[slot]));
        let dx = p[0] - c[0];
        let dy = p[1] - c[1];
        dx * dx + dy * dy
    }

    /// Change in cost from exchanging the occupants of two slots. Symmetric in
    /// its arguments, bit for bit.
    fn swap_delta(&self, pos: &[Vec3], a: usize, b: usize) -> f64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (x, y) = (self.slot_atom[lo], self.slot_atom[hi]);
        let mut before = 0.0;
        let mut after = 0.0;
        if x != NONE {
            before += self.atom_cost(&pos[x as usize], lo);
            after += self.atom_cost(&pos[x as usize], hi);
        }
        if y != NONE {
            before += self.atom_cost(&pos[y as usize], hi);
            after += self.atom_cost(&pos[y as usize], lo);
        }
        after - before
    }

    /// Slots within Chebyshev `radius` of `slot`, in ascending linear index.
    fn neighbor_slots(&self, slot: usize, radius: usize) -> impl Iterator<Item = usize> + '_ {
        let c = self.slots[slot];
        let (ew, eh) = self.layout.extent();
        let rows = c.row.saturating_sub(radius)..(c.row + radius + 1).min(eh);
        let cols = c.col.saturating_sub(radius)..(c.col + radius + 1).min(ew);
        rows.flat_map(move |row| cols.clone().map(move |col| row * ew + col))
            .filter_map(move |idx| match self.slot_at[idx] {
                NONE => None,
                s if s as usize == slot => None,
                s => Some(s as usize),
            })
    }

    /// Best beneficial swap partner for `slot`, or `None`.
    fn nominate(&self, pos: &[Vec3], slot: usize, radius: usize) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for other in self.neighbor_slots(slot, radius) {
            if self.slot_atom[slot] == NONE && self.slot_atom[other] == NONE {
                continue;
            }
            let d = self.swap_delta(pos, slot, other);
            if d < -REMAP_TOLERANCE && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, other));
            }
        }
        best.map(|(_, s)| s)
    }

    /// Every beneficial swap within `radius`, as `(slot_a, slot_b, delta)`.
    /// Exhaustive, used to audit remap fixed points.
    pub fn beneficial_swaps(&self, system: &AtomSystem, radius: usize) -> Vec<(Core, Core, f64)> {
        let mut out = Vec::new();
        for s in 0..self.slots.len() {
            for t in self.neighbor_slots(s, radius) {
                if t <= s || (self.slot_atom[s] == NONE && self.slot_atom[t] == NONE) {
                    continue;
                }
                let d = self.swap_delta(&system.positions, s, t);
                if d < -REMAP_TOLERANCE {
                    out.push((self.slots[s], self.slots[t], d));
                }
            }
        }
        out
    }

    /// Locality bound for pairs closer than `reach` at the current positions.
    pub fn locality_bound(&self, positions: &[Vec3], reach: f64) -> LocalityBound {
        let mut e = [0.0f64; 2];
        for (a, p) in positions.iter().enumerate() {
            let b = self.cell_bounds(self.owner(a));
            e[0] = e[0].max(b[0] - p[0]).max(p[0] - b[1]);
            e[1] = e[1].max(b[2] - p[1]).max(p[1] - b[3]);
        }
        let w = self.layout.cell_width;
        let dx = (1.0 + (reach + 2.0 * e[0]) / w).floor() as usize;
        let dy = (1.0 + (reach + 2.0 * e[1]) / w).floor() as usize;
        LocalityBound {
            horizontal: (dx + 1) * self.layout.rect_w - 1,
            vertical: (dy + 1) * self.layout.rect_h - 1,
            excursion: e,
            reach,
        }
    }

    /// Text dump: a header line, then `atom col row group...` per atom.
    pub fn dump(&self) -> String {
        let g = &self.grid;
        let l = &self.layout;
        let mut s = format!(
            "# placement width={} height={} k={} h={} stride={} cell_width={} cells={}x{} rect={}x{}\n",
            g.width,
            g.height,
            g.cores_per_atom,
            g.diagonal_spacing,
            g.stride(),
            l.cell_width,
            l.cells_x,
            l.cells_y,
            l.rect_w,
            l.rect_h
        );
        for a in 0..self.len() {
            let o = self.owner(a);
            write!(s, "{a} {} {}", o.col, o.row).unwrap();
            for c in self.grid.group(o) {
                write!(s, " {}:{}", c.col, c.row).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// One parsed line of [`Placement::dump`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpEntry {
    pub atom: usize,
    pub owner: Core,
    pub group: Vec<Core>,
}

pub fn parse_dump(text: &str, origin: &str) -> Result<Vec<DumpEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::parse(origin, i + 1, msg);
        let mut it = line.split_whitespace();
        let mut num = |what: &str| -> Result<usize> {
            it.next()
                .ok_or_else(|| bad(&format!("missing {what}")))?
                .parse()
                .map_err(|_| bad(&format!("bad {what}")))
        };
        let atom = num("atom id")?;
        let owner = Core::new(num("owner column")?, num("owner row")?);
        let group = it
            .map(|tok| {
                let (c, r) = tok.split_once(':').ok_or_else(|| bad("group core must be col:row"))?;
                match (c.parse(), r.parse()) {
                    (Ok(c), Ok(r)) => Ok(Core::new(c, r)),
                    _ => Err(bad("bad group core")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(DumpEntry { atom, owner, group });
    }
    Ok(out)
}

/// Σ over atoms of the squared projected distance to the owner cell centre, Å².
pub fn assignment_cost(placement: &Placement, system: &AtomSystem) -> f64 {
    (0..placement.len())
        .map(|a| placement.atom_cost(&system.positions[a], placement.atom_slot[a] as usize))
        .sum()
}

/// One round of the two-phase mutual-swap protocol.
///
/// Every slot (occupied or not) evaluates the cost change of exchanging
/// occupants with each slot within Chebyshev `radius`, then nominates its most
/// negative change, lowest linear core index on ties. Mutual nominations are
/// applied together.
pub fn greedy_remap(placement: &mut Placement, system: &AtomSystem, radius: usize) -> Result<RemapOutcome> {
    if radius == 0 {
        return Err(Error::Config("remap radius must be >= 1".into()));
    }
    if system.len() != placement.len() {
        return Err(Error::Consistency(format!(
            "placement holds {} atoms, system has {}",
            placement.len(),
            system.len()
        )));
    }
    let cost_before = assignment_cost(placement, system);
    let pos = &system.positions;
    let nominee: Vec<Option<usize>> = (0..placement.slots.len())
        .map(|s| placement.nominate(pos, s, radius))
        .collect();
    let mut swaps = Vec::new();
    for (s, &t) in nominee.iter().enumerate() {
        if let Some(t) = t {
            if s < t && nominee[t] == Some(s) {
                swaps.push((s, t));
            }
        }
    }
    for &(s, t) in &swaps {
        placement.slot_atom.swap(s, t);
        for slot in [s, t] {
            let a = placement.slot_atom[slot];
            if a != NONE {
                placement.atom_slot[a as usize] = slot as u32;
            }
        }
    }
    let cost_after = if swaps.is_empty() {
        cost_before
    } else {
        assignment_cost(placement, system)
    };
    Ok(RemapOutcome {
        swaps: swaps
            .into_iter()
            .map(|(s, t)| (placement.slots[s], placement.slots[t]))
            .collect(),
        cost_before,
        cost_after,
    })
}

/// Remaps until no mutual beneficial swap remains; returns the number of rounds
/// that committed swaps.
pub fn remap_to_fixed_point(placement: &mut Placement, system: &AtomSystem, radius: usize) -> Result<usize> {
    let mut rounds = 0;
    while !greedy_remap(placement, system, radius)?.swaps.is_empty() {
        rounds += 1;
    }
    Ok(rounds)
}
