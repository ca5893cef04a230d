//! Uniform node-centered grids, level-set domains and ghost-cell classification.
//!
//! Grid nodes carry indices `0..n` (per axis) and sit at `lo + i * h`, so the
//! first and last nodes coincide with the domain boundary. Each grid reserves
//! `ghost_width` extra layers of storage on every side; ghost indices are
//! negative or `>= n`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid1D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
    pub dx: f64,
    pub ghost_width: usize,
}

impl UniformGrid1D {
    pub fn new(x_lo: f64, x_hi: f64, n: usize, ghost_width: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::InvalidGrid(format!("empty interval [{x_lo}, {x_hi}]")));
        }
        Ok(Self { x_lo, x_hi, n, dx: (x_hi - x_lo) / (n - 1) as f64, ghost_width })
    }

    /// Coordinate of node `i`; ghost nodes use indices outside `0..n`.
    #[inline]
    pub fn x(&self, i: isize) -> f64 {
        self.x_lo + i as f64 * self.dx
    }

    #[inline]
    pub fn storage_len(&self) -> usize {
        self.n + 2 * self.ghost_width
    }

    #[inline]
    pub fn offset(&self, i: isize) -> usize {
        let k = i + self.ghost_width as isize;
        debug_assert!(k >= 0 && (k as usize) < self.storage_len(), "node {i} outside storage");
        k as usize
    }

    pub fn with_ghost_width(&self, ghost_width: usize) -> Self {
        Self { ghost_width, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid2D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    /// `dy / dx`, kept so the optimal advection ratio can be checked directly.
    pub dy_over_dx: f64,
    pub ghost_width: usize,
}

impl UniformGrid2D {
    pub fn new(
        (x_lo, x_hi): (f64, f64),
        (y_lo, y_hi): (f64, f64),
        nx: usize,
        ny: usize,
        ghost_width: usize,
    ) -> Result<Self> {
        let gx = UniformGrid1D::new(x_lo, x_hi, nx, ghost_width)?;
        let gy = UniformGrid1D::new(y_lo, y_hi, ny, ghost_width)?;
        Ok(Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            nx,
            ny,
            dx: gx.dx,
            dy: gy.dx,
            dy_over_dx: gy.dx / gx.dx,
            ghost_width,
        })
    }

    /// Builds a grid from explicit spacings; the upper corners follow from the node counts.
    pub fn with_spacing(
        (x_lo, y_lo): (f64, f64),
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        ghost_width: usize,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2x2 nodes, got {nx}x{ny}")));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::InvalidGrid(format!("non-positive spacing dx = {dx}, dy = {dy}")));
        }
        Ok(Self {
            x_lo,
            x_hi: x_lo + (nx - 1) as f64 * dx,
            y_lo,
            y_hi: y_lo + (ny - 1) as f64 * dy,
            nx,
            ny,
            dx,
            dy,
            dy_over_dx: dy / dx,
            ghost_width,
        })
    }

    /// Square grid on `[lo, hi]^2` with `n` nodes per side.
    pub fn square(lo: f64, hi: f64, n: usize, ghost_width: usize) -> Result<Self> {
        Self::new((lo, hi), (lo, hi), n, n, ghost_width)
    }

    #[inline]
    pub fn x(&self, i: isize) -> f64 {
        self.x_lo + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: isize) -> f64 {
        self.y_lo + j as f64 * self.dy
    }

    #[inline]
    pub fn row_len(&self) -> usize {
        self.nx + 2 * self.ghost_width
    }

    #[inline]
    pub fn storage_len(&self) -> usize {
        self.row_len() * (self.ny + 2 * self.ghost_width)
    }

    #[inline]
    pub fn offset(&self, i: isize, j: isize) -> usize {
        let g = self.ghost_width as isize;
        debug_assert!(
            i >= -g && i < self.nx as isize + g && j >= -g && j < self.ny as isize + g,
            "node ({i}, {j}) outside storage"
        );
        (j + g) as usize * self.row_len() + (i + g) as usize
    }

    pub fn is_square(&self) -> bool {
        (self.dx - self.dy).abs() <= 1e-14 * self.dx.max(self.dy)
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::AnisotropicGrid { dx: self.dx, dy: self.dy })
        }
    }

    /// True for nodes on the outermost ring of the grid.
    #[inline]
    pub fn on_frame(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }
}

pub type LevelSet = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Domain given as the region where a level-set function is non-positive.
#[derive(Clone)]
pub struct ImplicitDomain {
    pub phi: LevelSet,
    pub grid: UniformGrid2D,
}

impl fmt::Debug for ImplicitDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitDomain").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl ImplicitDomain {
    pub fn new(phi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, grid: UniformGrid2D) -> Self {
        Self { phi: Arc::new(phi), grid }
    }

    /// Five-lobed star: `r - (r0 + amplitude * cos(5 (theta - rotation)))`.
    pub fn starfish(r0: f64, amplitude: f64, rotation: f64, grid: UniformGrid2D) -> Self {
        Self::new(move |x, y| starfish_phi(x, y, r0, amplitude, rotation), grid)
    }

    #[inline]
    pub fn phi_at(&self, i: isize, j: isize) -> f64 {
        (self.phi)(self.grid.x(i), self.grid.y(j))
    }
}

pub fn starfish_phi(x: f64, y: f64, r0: f64, amplitude: f64, rotation: f64) -> f64 {
    let r = x.hypot(y);
    let theta = y.atan2(x);
    r - (r0 + amplitude * (5.0 * (theta - rotation)).cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Interior,
    EdgeGhost,
    CornerGhost,
    FarExterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// One admissible fill direction for an edge ghost.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCandidate {
    pub axis: Axis,
    /// Index step (+1 or -1) from the ghost toward the interior.
    pub dir: i8,
    /// Distance from the ghost to the boundary point, in units of the spacing, in `(0, 1]`.
    pub frac: f64,
    /// Boundary point `u_B` location.
    pub boundary: (f64, f64),
    /// Number of consecutive interior nodes along the axis starting next to the ghost (capped at 4).
    pub interior_run: usize,
}

impl EdgeCandidate {
    /// Interior offsets (in nodes from the ghost) used by the cubic extrapolant,
    /// or `None` if there are not enough interior points.
    pub fn support(&self, theta: f64) -> Option<[usize; 3]> {
        let support = if 1.0 - self.frac < theta { [2, 3, 4] } else { [1, 2, 3] };
        (self.interior_run >= support[2]).then_some(support)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeGhost {
    pub i: usize,
    pub j: usize,
    pub candidates: Vec<EdgeCandidate>,
}

impl EdgeGhost {
    /// Picks the admissible direction whose boundary point lies farthest from
    /// the nearest interior node.
    pub fn choose(&self, theta: f64) -> Option<(&EdgeCandidate, [usize; 3])> {
        self.candidates
            .iter()
            .filter_map(|c| c.support(theta).map(|s| (c, s)))
            .max_by(|a, b| (1.0 - a.0.frac).total_cmp(&(1.0 - b.0.frac)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CornerGhost {
    pub i: usize,
    pub j: usize,
    /// Nearest interior neighbor, diagonal to the ghost.
    pub anchor: (usize, usize),
    /// `ghost = anchor + orient`.
    pub orient: (i8, i8),
}

/// Offsets and weights of the corner extrapolation for a ghost at `(+1, +1)`
/// from its anchor `(0, 0)`.
pub const CORNER_STENCIL: [((i8, i8), f64); 8] = [
    ((0, 0), -4.0),
    ((-1, -1), -1.0),
    ((1, 0), 2.0),
    ((0, 1), 2.0),
    ((1, -1), -1.0),
    ((-1, 1), -1.0),
    ((0, -1), 2.0),
    ((-1, 0), 2.0),
];

#[derive(Clone, Debug)]
pub struct CellClassification {
    pub grid: UniformGrid2D,
    /// Row-major over grid nodes (`j * nx + i`), ghost layers excluded.
    pub kinds: Vec<NodeKind>,
    pub edge_ghosts: Vec<EdgeGhost>,
    pub corner_ghosts: Vec<CornerGhost>,
    /// Interior nodes the stepper updates (interior and off the grid frame).
    pub active: Vec<(usize, usize)>,
    /// Nodes with `phi == 0` exactly, counted as interior.
    pub on_boundary: usize,
}

impl CellClassification {
    #[inline]
    pub fn kind(&self, i: usize, j: usize) -> NodeKind {
        self.kinds[j * self.grid.nx + i]
    }

    #[inline]
    pub fn kind_at(&self, i: isize, j: isize) -> Option<NodeKind> {
        (i >= 0 && j >= 0 && (i as usize) < self.grid.nx && (j as usize) < self.grid.ny)
            .then(|| self.kind(i as usize, j as usize))
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    #[inline]
    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.kind(i, j) == NodeKind::Interior && !self.grid.on_frame(i, j)
    }
}

const EDGE_SAMPLES: [f64; 3] = [0.25, 0.5, 0.75];
const N4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const DIAG: [(isize, isize); 4] = [(1, 1), (-1, 1), (1, -1), (-1, -1)];

#[inline]
fn inside(phi: f64) -> bool {
    phi <= 0.0
}

/// Classifies every grid node of the domain's bounding grid.
///
/// Interior nodes on the grid frame are treated as Dirichlet nodes: they are
/// never updated and never need ghosts.
pub fn classify_cells(domain: &ImplicitDomain) -> Result<CellClassification> {
    let grid = &domain.grid;
    let (nx, ny) = (grid.nx, grid.ny);
    let phi: Vec<f64> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| domain.phi_at(i as isize, j as isize))
        .collect();
    let at = |i: isize, j: isize| phi[j as usize * nx + i as usize];
    let in_grid = |i: isize, j: isize| i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny;

    check_resolution(domain, &phi)?;

    let on_boundary = phi.iter().filter(|&&p| p == 0.0).count();
    let is_active =
        |i: isize, j: isize| in_grid(i, j) && inside(at(i, j)) && !grid.on_frame(i as usize, j as usize);

    let mut kinds = vec![NodeKind::FarExterior; nx * ny];
    let mut active = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (ii, jj) = (i as isize, j as isize);
            kinds[j * nx + i] = if inside(at(ii, jj)) {
                if is_active(ii, jj) {
                    active.push((i, j));
                }
                NodeKind::Interior
            } else if N4.iter().chain(&DIAG).any(|&(a, b)| is_active(ii + a, jj + b)) {
                if N4.iter().any(|&(a, b)| in_grid(ii + a, jj + b) && inside(at(ii + a, jj + b))) {
                    NodeKind::EdgeGhost
                } else {
                    NodeKind::CornerGhost
                }
            } else {
                NodeKind::FarExterior
            };
        }
    }
    if active.is_empty() {
        return Err(Error::DegenerateDomain);
    }

    let kind = |i: isize, j: isize| in_grid(i, j).then(|| kinds[j as usize * nx + i as usize]);
    let is_interior = |i: isize, j: isize| kind(i, j) == Some(NodeKind::Interior);

    let mut edge_ghosts = Vec::new();
    let mut corner_ghosts = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (ii, jj) = (i as isize, j as isize);
            match kinds[j * nx + i] {
                NodeKind::EdgeGhost => {
                    let phi_g = at(ii, jj);
                    let candidates = N4
                        .iter()
                        .filter(|&&(a, b)| is_interior(ii + a, jj + b))
                        .map(|&(a, b)| {
                            let phi_n = at(ii + a, jj + b);
                            let frac = phi_g / (phi_g - phi_n);
                            let (xg, yg) = (grid.x(ii), grid.y(jj));
                            let boundary = (xg + frac * a as f64 * grid.dx, yg + frac * b as f64 * grid.dy);
                            let interior_run =
                                (1..=4).take_while(|&k| is_interior(ii + k * a, jj + k * b)).count();
                            EdgeCandidate {
                                axis: if a != 0 { Axis::X } else { Axis::Y },
                                dir: (a + b) as i8,
                                frac,
                                boundary,
                                interior_run,
                            }
                        })
                        .collect();
                    edge_ghosts.push(EdgeGhost { i, j, candidates });
                }
                NodeKind::CornerGhost => {
                    let anchor = DIAG
                        .iter()
                        .map(|&(a, b)| (ii - a, jj - b, a as i8, b as i8))
                        .filter(|&(ai, aj, ..)| is_active(ai, aj))
                        .find(|&(ai, aj, sx, sy)| {
                            CORNER_STENCIL.iter().all(|&((p, q), _)| {
                                matches!(
                                    kind(ai + (sx * p) as isize, aj + (sy * q) as isize),
                                    Some(NodeKind::Interior | NodeKind::EdgeGhost)
                                )
                            })
                        });
                    let (ai, aj, sx, sy) = anchor.ok_or(Error::CornerStencil { i, j })?;
                    corner_ghosts.push(CornerGhost {
                        i,
                        j,
                        anchor: (ai as usize, aj as usize),
                        orient: (sx, sy),
                    });
                }
                _ => {}
            }
        }
    }

    Ok(CellClassification { grid: grid.clone(), kinds, edge_ghosts, corner_ghosts, active, on_boundary })
}

fn check_resolution(domain: &ImplicitDomain, phi: &[f64]) -> Result<()> {
    let grid = &domain.grid;
    let nx = grid.nx;
    for j in 0..grid.ny {
        for i in 0..nx {
            let (x0, y0) = (grid.x(i as isize), grid.y(j as isize));
            let p0 = phi[j * nx + i];
            let mut edges = Vec::with_capacity(2);
            if i + 1 < nx {
                edges.push(((grid.dx, 0.0), phi[j * nx + i + 1]));
            }
            if j + 1 < grid.ny {
                edges.push(((0.0, grid.dy), phi[(j + 1) * nx + i]));
            }
            for ((hx, hy), p1) in edges {
                let mut prev = inside(p0);
                let mut changes = 0;
                let samples = EDGE_SAMPLES.iter().map(|&s| (domain.phi)(x0 + s * hx, y0 + s * hy));
                for p in samples.chain(std::iter::once(p1)) {
                    let cur = inside(p);
                    if cur != prev {
                        changes += 1;
                    }
                    prev = cur;
                }
                if changes > 1 {
                    return Err(Error::UnresolvedBoundary { i, j });
                }
            }
        }
    }
    Ok(())
}

/// Root of the linear interpolant of `phi` between an exterior node and its
/// interior neighbor.
pub fn boundary_point(
    ghost: (f64, f64),
    neighbor: (f64, f64),
    phi: &dyn Fn(f64, f64) -> f64,
) -> Result<(f64, f64)> {
    let pg = phi(ghost.0, ghost.1);
    let pn = phi(neighbor.0, neighbor.1);
    if !(pg > 0.0 && pn < 0.0) && !(pg < 0.0 && pn > 0.0) {
        return Err(Error::NoSignChange);
    }
    let s = pg / (pg - pn);
    Ok((ghost.0 + s * (neighbor.0 - ghost.0), ghost.1 + s * (neighbor.1 - ghost.1)))
}
