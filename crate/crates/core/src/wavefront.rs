//! Directional Sobolev order estimation and discrete wave front sets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conic::{resample_cone, ConicRegionSet};
use crate::directions::{DirectionGrid, DirectionSet};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::region::{CellLattice, SpatialRegion};
use crate::seminorm::{least_squares, shell_of, AnnulusProfile};
use crate::spectral::SpectralDistribution;
use crate::window::WindowFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// First shell of the fit.
    pub j_lo: usize,
    /// Shells dropped below the top `log₂(N/2)`.
    pub top_drop: usize,
    /// Absolute shell-energy floor.
    pub floor_abs: f64,
    /// Floor relative to the windowed field's total energy.
    pub floor_rel: f64,
    /// A shell counts only if its energy exceeds this multiple of its truncation-noise bound.
    pub noise_factor: f64,
    /// Fitted orders above this are reported as smooth.
    pub smooth_ceiling: f64,
    /// Fitted orders within this distance of the window's own apparent order are reported as smooth.
    pub window_gap: f64,
    /// Dead band of the `ŝ < r - margin` threshold.
    pub margin: f64,
    /// Cap half-angle of directional estimates in two dimensions.
    pub cap_half_angle: f64,
    /// Direction cells of order fields in two dimensions.
    pub circle_directions: usize,
    /// Cells of an order field whose energy is below this fraction of the largest cell energy are reported smooth.
    #[serde(default = "default_cell_floor")]
    pub cell_floor: f64,
}

fn default_cell_floor() -> f64 {
    1e-14
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            j_lo: 3,
            top_drop: 2,
            floor_abs: 1e-24,
            floor_rel: 1e-20,
            noise_factor: 100.0,
            smooth_ceiling: 6.0,
            window_gap: 1.0,
            margin: 0.1,
            cap_half_angle: 15f64.to_radians(),
            circle_directions: 24,
            cell_floor: default_cell_floor(),
        }
    }
}

impl FitConfig {
    pub fn j_hi(&self, n: usize) -> usize {
        (n.trailing_zeros() as usize - 1).saturating_sub(self.top_drop)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Fitted,
    Smooth,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub status: FitStatus,
    /// `β/2` from `log₂E_j = c - βj`; absent unless fitted.
    pub order: Option<f64>,
    pub slope: Option<f64>,
    pub residual: Option<f64>,
    pub shells_used: usize,
    /// Orders above this were reported as smooth.
    pub ceiling: f64,
}

impl OrderEstimate {
    fn smooth(slope: Option<f64>, residual: Option<f64>, shells_used: usize, ceiling: f64) -> Self {
        OrderEstimate {
            status: FitStatus::Smooth,
            order: None,
            slope,
            residual,
            shells_used,
            ceiling,
        }
    }

    fn undecided() -> Self {
        OrderEstimate {
            status: FitStatus::Undecided,
            order: None,
            slope: None,
            residual: None,
            shells_used: 0,
            ceiling: f64::NAN,
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.status == FitStatus::Smooth
    }

    /// Order with smooth mapped to `+∞` and undecided to `NaN`.
    pub fn value(&self) -> f64 {
        match self.status {
            FitStatus::Fitted => self.order.unwrap_or(f64::NAN),
            FitStatus::Smooth => f64::INFINITY,
            FitStatus::Undecided => f64::NAN,
        }
    }

    /// True when the cell-direction enters `WF^r`: `ŝ < r - margin`.
    pub fn below(&self, r: f64, margin: f64) -> bool {
        self.status == FitStatus::Fitted && self.order.is_some_and(|s| s < r - margin)
    }
}

/// Shell sums of a windowed field, its truncation-noise bound and the window's own spectrum.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShellSums {
    pub energy: Vec<f64>,
    pub noise: Vec<f64>,
    pub reference: Vec<f64>,
}

impl ShellSums {
    fn with_shells(n: usize) -> Self {
        ShellSums {
            energy: vec![0.0; n],
            noise: vec![0.0; n],
            reference: vec![0.0; n],
        }
    }
}

/// Least-squares order of a shell range; `None` when a shell is at or below `floor`.
fn shell_fit(values: &[f64], lo: usize, hi: usize, floor: f64) -> Option<(f64, f64, usize)> {
    let points: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&j| values[j] > floor)
        .map(|j| (j as f64, values[j].log2()))
        .collect();
    if points.len() < hi - lo + 1 {
        return None;
    }
    least_squares(&points).map(|(slope, _, residual)| (slope, residual, points.len()))
}

/// Regression of `log₂E_j` with the smooth rules: any unresolved shell in range, or an order
/// above the ceiling, reports smooth.
pub fn fit_shells(
    sums: &ShellSums,
    total: f64,
    n: usize,
    cfg: &FitConfig,
) -> Result<OrderEstimate> {
    let top = sums.energy.len().saturating_sub(1);
    let hi = cfg.j_hi(n).min(top);
    if hi < cfg.j_lo || hi - cfg.j_lo + 1 < 3 {
        return Err(Error::DegenerateFit(format!(
            "shell range [{}, {hi}] holds fewer than 3 shells",
            cfg.j_lo
        )));
    }
    let ref_total: f64 = sums.reference.iter().sum();
    let ceiling = match shell_fit(&sums.reference, cfg.j_lo, hi, cfg.floor_rel * ref_total) {
        Some((slope, _, _)) => cfg.smooth_ceiling.min(-slope / 2.0 - cfg.window_gap),
        None => cfg.smooth_ceiling,
    };
    let floor = cfg.floor_abs.max(cfg.floor_rel * total);
    let resolved = (cfg.j_lo..=hi).all(|j| {
        let e = sums.energy[j];
        e >= floor && e > cfg.noise_factor * sums.noise.get(j).copied().unwrap_or(0.0)
    });
    if !resolved {
        return Ok(OrderEstimate::smooth(None, None, 0, ceiling));
    }
    let (slope, residual, used) = shell_fit(&sums.energy, cfg.j_lo, hi, 0.0)
        .ok_or_else(|| Error::DegenerateFit("collinear abscissae".into()))?;
    let order = -slope / 2.0;
    if order > ceiling {
        return Ok(OrderEstimate::smooth(
            Some(slope),
            Some(residual),
            used,
            ceiling,
        ));
    }
    Ok(OrderEstimate {
        status: FitStatus::Fitted,
        order: Some(order),
        slope: Some(slope),
        residual: Some(residual),
        shells_used: used,
        ceiling,
    })
}

/// Fit of a bare shell profile (no noise bound, fixed ceiling).
pub fn fit_profile(
    profile: &AnnulusProfile,
    total: f64,
    n: usize,
    cfg: &FitConfig,
) -> Result<OrderEstimate> {
    let mut energy = vec![0.0; profile.j_max() + 1];
    for (i, e) in profile.energies.iter().enumerate() {
        energy[i + profile.j_min] = *e;
    }
    let len = energy.len();
    let sums = ShellSums {
        energy,
        noise: vec![0.0; len],
        reference: vec![0.0; len],
    };
    fit_shells(&sums, total, n, cfg)
}

/// `ℱ(ψu)` with a bound on the error from truncating `û` at the band edge, and `|ψ̂|²`.
///
/// The bound takes `|û|` beyond the band to be at most its largest value in the outer
/// quarter of the lattice; the error at `k` is then that amplitude times the mass of
/// `|ψ̂(k - l)|` over `l` outside the band.
#[derive(Debug, Clone)]
pub struct ResolvedSpectrum {
    grid: GridSpec,
    power: Vec<f64>,
    noise: Vec<f64>,
    reference: Vec<f64>,
}

impl ResolvedSpectrum {
    pub fn new(u: &SpectralDistribution, psi: &WindowFunction) -> Result<Self> {
        let windowed = u.window_multiply(psi)?;
        let grid = *u.grid();
        let n = grid.size() as i64;
        let dim = grid.dim();
        let fine = 2 * grid.size();
        let quarter = n / 4;
        let edge = (0..grid.len())
            .filter(|&flat| grid.freq(flat)[..dim].iter().any(|k| k.abs() >= quarter))
            .map(|flat| u.coeffs()[flat].norm())
            .fold(0.0, f64::max);
        // Per axis and band index: (in-band mass, out-of-band mass, |ψ̂(k)|).
        let axes: Vec<Vec<(f64, f64, f64)>> = (0..dim)
            .map(|a| {
                let spec = psi.axis_spectrum_abs(a, fine);
                let at = |q: i64| spec[q.rem_euclid(fine as i64) as usize];
                let mut prefix = vec![0.0; fine + 1];
                for (i, q) in (-n..n).enumerate() {
                    prefix[i + 1] = prefix[i] + at(q);
                }
                let range = |lo: i64, hi: i64| {
                    let (lo, hi) = (lo.max(-n), hi.min(n - 1));
                    if lo > hi {
                        0.0
                    } else {
                        prefix[(hi + n + 1) as usize] - prefix[(lo + n) as usize]
                    }
                };
                (0..grid.size())
                    .map(|i| {
                        let k = grid.wavenumber(i);
                        let inside = range(k - n / 2 + 1, k + n / 2 - 1);
                        let outside = range(-n, k - n / 2) + range(k + n / 2, n - 1);
                        (inside, outside, at(k))
                    })
                    .collect()
            })
            .collect();
        let scale = psi.scale_factor().abs();
        let mut noise = Vec::with_capacity(grid.len());
        let mut reference = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let mut rem = flat;
            let mut idx = [0usize; crate::grid::MAX_DIM];
            for a in (0..dim).rev() {
                idx[a] = rem % grid.size();
                rem /= grid.size();
            }
            let (mut inside, mut diff, mut own) = (1.0, 0.0, 1.0);
            for a in 0..dim {
                let (s, t, r) = axes[a][idx[a]];
                diff = diff * (s + t) + inside * t;
                inside *= s;
                own *= r;
            }
            noise.push((scale * edge * diff).powi(2));
            reference.push((scale * own).powi(2));
        }
        Ok(ResolvedSpectrum {
            grid,
            power: windowed.coeffs().iter().map(|c| c.norm_sqr()).collect(),
            noise,
            reference,
        })
    }

    /// The raw spectrum: no window, no truncation noise, a point-mass reference.
    pub fn unwindowed(u: &SpectralDistribution) -> Self {
        let grid = *u.grid();
        let mut reference = vec![0.0; grid.len()];
        reference[0] = 1.0;
        ResolvedSpectrum {
            grid,
            power: u.coeffs().iter().map(|c| c.norm_sqr()).collect(),
            noise: vec![0.0; grid.len()],
            reference,
        }
    }

    /// The windowed spectrum of `(φ⊗ψ)(u⊗v)` from those of `φu` and `ψv`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.grid.dim() + other.grid.dim();
        let grid = GridSpec::new(dim, self.grid.size())?;
        let mut power = Vec::with_capacity(grid.len());
        let mut noise = Vec::with_capacity(grid.len());
        let mut reference = Vec::with_capacity(grid.len());
        for i in 0..self.power.len() {
            let (pa, na, ra) = (self.power[i], self.noise[i].sqrt(), self.reference[i]);
            let aa = pa.sqrt();
            for j in 0..other.power.len() {
                let (pb, nb, rb) = (other.power[j], other.noise[j].sqrt(), other.reference[j]);
                power.push(pa * pb);
                noise.push((na * pb.sqrt() + aa * nb + na * nb).powi(2));
                reference.push(ra * rb);
            }
        }
        Ok(ResolvedSpectrum {
            grid,
            power,
            noise,
            reference,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn energy(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Shell sums over a lattice mask (all nonzero frequencies when `None`).
    pub fn shell_sums(&self, mask: Option<&[bool]>) -> ShellSums {
        let norms = self.grid.norms_squared();
        let top = norms
            .iter()
            .copied()
            .max()
            .map_or(0, |n| if n > 0 { shell_of(n) } else { 0 });
        let mut out = ShellSums::with_shells(top + 1);
        for (i, n) in norms.iter().enumerate() {
            if *n == 0 || mask.is_some_and(|m| !m[i]) {
                continue;
            }
            let j = shell_of(*n);
            out.energy[j] += self.power[i];
            out.noise[j] += self.noise[i];
            out.reference[j] += self.reference[i];
        }
        out
    }

    /// Shell sums for every direction cell at once.
    fn directional_sums(&self, bins: &DirectionBins) -> Vec<ShellSums> {
        let mut out = vec![ShellSums::with_shells(bins.shells_len); bins.directions];
        for i in 0..self.power.len() {
            let j = bins.shell[i] as usize;
            for &d in &bins.dirs[bins.offsets[i] as usize..bins.offsets[i + 1] as usize] {
                let s = &mut out[d as usize];
                s.energy[j] += self.power[i];
                s.noise[j] += self.noise[i];
                s.reference[j] += self.reference[i];
            }
        }
        out
    }
}

/// Shell and direction-cell membership of every lattice point.
struct DirectionBins {
    shell: Vec<u8>,
    offsets: Vec<u32>,
    dirs: Vec<u16>,
    directions: usize,
    shells_len: usize,
}

impl DirectionBins {
    fn new(grid: &GridSpec, directions: &DirectionGrid, half_angle: f64) -> Self {
        let dim = grid.dim();
        let norms = grid.norms_squared();
        let shells_len = norms.iter().copied().max().map_or(0, shell_of) + 1;
        let count = directions.len();
        let cos_limit = (half_angle + 1e-12).min(PI).cos();
        let reps: Vec<Vec<f64>> = (0..count).map(|d| directions.representative(d)).collect();
        let mut shell = Vec::with_capacity(grid.len());
        let mut offsets = Vec::with_capacity(grid.len() + 1);
        let mut dirs = Vec::new();
        offsets.push(0u32);
        for (flat, n2) in norms.iter().enumerate() {
            if *n2 == 0 {
                shell.push(0);
                offsets.push(dirs.len() as u32);
                continue;
            }
            shell.push(shell_of(*n2) as u8);
            let k = grid.freq(flat);
            let kn = (*n2 as f64).sqrt();
            if dim == 1 {
                dirs.push(if k[0] > 0 { 1 } else { 0 });
            } else {
                for (d, rep) in reps.iter().enumerate() {
                    let dot: f64 = k[..dim].iter().zip(rep).map(|(a, b)| *a as f64 * b).sum();
                    if dot / kn >= cos_limit {
                        dirs.push(d as u16);
                    }
                }
            }
            offsets.push(dirs.len() as u32);
        }
        DirectionBins {
            shell,
            offsets,
            dirs,
            directions: count,
            shells_len,
        }
    }
}

/// Lattice points within `half_angle` of `omega` (sign match in one dimension).
pub fn cap_mask(grid: &GridSpec, omega: &[f64], half_angle: f64) -> Vec<bool> {
    let dim = grid.dim();
    let norm: f64 = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cos_limit = (half_angle + 1e-12).min(PI).cos();
    (0..grid.len())
        .map(|flat| {
            let k = grid.freq(flat);
            let k = &k[..dim];
            let kn: f64 = k.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            if kn == 0.0 {
                return false;
            }
            if dim == 1 {
                return (k[0] as f64) * omega[0] > 0.0;
            }
            let dot: f64 = k.iter().zip(omega).map(|(a, b)| *a as f64 * b).sum();
            dot / (kn * norm) >= cos_limit
        })
        .collect()
}

/// Order of `ψu` over a lattice mask (all nonzero frequencies when `None`).
pub fn estimate_order_masked(
    u: &SpectralDistribution,
    psi: &WindowFunction,
    mask: Option<&[bool]>,
    cfg: &FitConfig,
) -> Result<OrderEstimate> {
    let spectrum = ResolvedSpectrum::new(u, psi)?;
    fit_shells(
        &spectrum.shell_sums(mask),
        spectrum.energy(),
        u.grid().size(),
        cfg,
    )
}

/// Global order: the unwindowed spectrum over all directions.
pub fn estimate_global_order(u: &SpectralDistribution, cfg: &FitConfig) -> Result<OrderEstimate> {
    let spectrum = ResolvedSpectrum::unwindowed(u);
    fit_shells(
        &spectrum.shell_sums(None),
        spectrum.energy(),
        u.grid().size(),
        cfg,
    )
}

/// Order of the cell-windowed field in the cap around `omega`.
pub fn estimate_order_directional(
    u: &SpectralDistribution,
    lattice: &CellLattice,
    cell: usize,
    omega: &[f64],
    cone_half_angle: f64,
    cfg: &FitConfig,
) -> Result<OrderEstimate> {
    let mask = cap_mask(u.grid(), omega, cone_half_angle);
    estimate_order_masked(u, &lattice.window(cell), Some(&mask), cfg)
}

/// Orders per (cell, direction) with per-cell windowed energies.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderField {
    lattice: CellLattice,
    directions: DirectionGrid,
    entries: Vec<Vec<OrderEstimate>>,
    energies: Vec<f64>,
    config: FitConfig,
}

/// One CSV row of an order field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub cell: usize,
    pub center: String,
    pub direction: usize,
    pub angle: f64,
    pub order: f64,
    pub status: FitStatus,
    pub slope: f64,
    pub residual: f64,
    pub shells: usize,
}

impl OrderField {
    pub fn compute(
        u: &SpectralDistribution,
        lattice: &CellLattice,
        cfg: &FitConfig,
    ) -> Result<Self> {
        let dim = u.dim();
        if dim != lattice.dim() || dim > 2 {
            return Err(Error::DimMismatch(format!(
                "order fields need a field and lattice of equal dimension up to 2, got {dim} and {}",
                lattice.dim()
            )));
        }
        Self::from_cells(u.grid(), lattice, cfg, |cell| {
            ResolvedSpectrum::new(u, &lattice.window(cell))
        })
    }

    /// Order field of `u⊗v` on the product lattice, from factor windowings only.
    pub fn compute_tensor(
        u: &SpectralDistribution,
        v: &SpectralDistribution,
        cfg: &FitConfig,
    ) -> Result<Self> {
        if u.dim() + v.dim() > 2 {
            return Err(Error::DimMismatch(
                "tensor order fields are limited to two dimensions".into(),
            ));
        }
        if u.grid().size() != v.grid().size() {
            return Err(Error::GridMismatch("tensor factors on different N".into()));
        }
        let (lu, lv) = (
            CellLattice::standard(u.dim()),
            CellLattice::standard(v.dim()),
        );
        let first: Vec<ResolvedSpectrum> = (0..lu.len())
            .map(|c| ResolvedSpectrum::new(u, &lu.window(c)))
            .collect::<Result<_>>()?;
        let second: Vec<ResolvedSpectrum> = (0..lv.len())
            .map(|c| ResolvedSpectrum::new(v, &lv.window(c)))
            .collect::<Result<_>>()?;
        let lattice = CellLattice::standard(u.dim() + v.dim());
        let grid = GridSpec::new(u.dim() + v.dim(), u.grid().size())?;
        Self::from_cells(&grid, &lattice, cfg, |cell| {
            first[cell / lv.len()].tensor(&second[cell % lv.len()])
        })
    }

    fn from_cells(
        grid: &GridSpec,
        lattice: &CellLattice,
        cfg: &FitConfig,
        mut spectrum_of: impl FnMut(usize) -> Result<ResolvedSpectrum>,
    ) -> Result<Self> {
        let directions = if grid.dim() == 1 {
            DirectionGrid::Signs
        } else {
            DirectionGrid::circle(cfg.circle_directions)
        };
        let bins = DirectionBins::new(grid, &directions, cfg.cap_half_angle);
        let n = grid.size();
        let mut sums = Vec::with_capacity(lattice.len());
        let mut energies = Vec::with_capacity(lattice.len());
        for cell in 0..lattice.len() {
            let spectrum = spectrum_of(cell)?;
            energies.push(spectrum.energy());
            sums.push(spectrum.directional_sums(&bins));
        }
        let top = energies.iter().copied().fold(0.0, f64::max);
        let entries = sums
            .iter()
            .zip(&energies)
            .map(|(cell_sums, &total)| {
                cell_sums
                    .iter()
                    .map(|s| {
                        if total < cfg.cell_floor * top {
                            OrderEstimate::smooth(None, None, 0, cfg.smooth_ceiling)
                        } else {
                            fit_shells(s, total, n, cfg)
                                .unwrap_or_else(|_| OrderEstimate::undecided())
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(OrderField {
            lattice: *lattice,
            directions,
            entries,
            energies,
            config: *cfg,
        })
    }

    pub fn lattice(&self) -> &CellLattice {
        &self.lattice
    }

    pub fn directions(&self) -> &DirectionGrid {
        &self.directions
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    pub fn get(&self, cell: usize, direction: usize) -> &OrderEstimate {
        &self.entries[cell][direction]
    }

    pub fn cell_energy(&self, cell: usize) -> f64 {
        self.energies[cell]
    }

    /// Cells whose windowed energy exceeds `rel` times the largest.
    pub fn support_cells(&self, rel: f64) -> Vec<usize> {
        let top = self.energies.iter().copied().fold(0.0, f64::max);
        (0..self.energies.len())
            .filter(|&c| top > 0.0 && self.energies[c] > rel * top)
            .collect()
    }

    pub fn undecided(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, row) in self.entries.iter().enumerate() {
            for (d, e) in row.iter().enumerate() {
                if e.status == FitStatus::Undecided {
                    out.push((c, d));
                }
            }
        }
        out
    }

    /// Minimum over directions of the fitted order at a cell.
    pub fn cell_order(&self, cell: usize) -> f64 {
        self.entries[cell]
            .iter()
            .map(|e| e.value())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn wavefront(&self, r: f64) -> WavefrontSet {
        let masks: Vec<DirectionSet> = self
            .entries
            .iter()
            .map(|row| {
                DirectionSet::from_mask(
                    self.directions.clone(),
                    row.iter().map(|e| e.below(r, self.config.margin)).collect(),
                )
            })
            .collect();
        WavefrontSet {
            r,
            set: ConicRegionSet::from_cell_masks(&self.lattice, &masks),
            lattice: self.lattice,
            undecided: self.undecided(),
        }
    }

    pub fn rows(&self) -> Vec<OrderRow> {
        let mut out = Vec::new();
        for (cell, row) in self.entries.iter().enumerate() {
            let center = self
                .lattice
                .center(cell)
                .iter()
                .map(|c| format!("{c:.4}"))
                .collect::<Vec<_>>()
                .join(" ");
            for (d, e) in row.iter().enumerate() {
                let rep = self.directions.representative(d);
                let angle = if rep.len() == 1 {
                    rep[0]
                } else {
                    rep[1].atan2(rep[0]).to_degrees()
                };
                out.push(OrderRow {
                    cell,
                    center: center.clone(),
                    direction: d,
                    angle,
                    order: e.value(),
                    status: e.status,
                    slope: e.slope.unwrap_or(f64::NAN),
                    residual: e.residual.unwrap_or(f64::NAN),
                    shells: e.shells_used,
                });
            }
        }
        out
    }
}

/// Discrete `WF^r`: cells and direction cells with `ŝ < r - margin`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefrontSet {
    pub r: f64,
    pub set: ConicRegionSet,
    pub lattice: CellLattice,
    /// Cells and directions whose fit was degenerate.
    pub undecided: Vec<(usize, usize)>,
}

impl WavefrontSet {
    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn cell_masks(&self) -> Vec<DirectionSet> {
        self.set.cell_masks(&self.lattice)
    }

    pub fn cells(&self) -> Vec<usize> {
        self.set.projection(&self.lattice)
    }

    /// Pairs `(cell, direction)` of the set.
    pub fn members(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, m) in self.cell_masks().iter().enumerate() {
            out.extend(m.indices().into_iter().map(|d| (c, d)));
        }
        out
    }
}

pub fn estimate_wavefront(
    u: &SpectralDistribution,
    r: f64,
    lattice: &CellLattice,
    cfg: &FitConfig,
) -> Result<WavefrontSet> {
    Ok(OrderField::compute(u, lattice, cfg)?.wavefront(r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub contained: bool,
    /// Violating `(cell, direction index)` pairs.
    pub violations: Vec<(usize, usize)>,
}

/// `WF^r ⊆ L` on the wave front's discretization (cones of `L` are resampled if needed).
pub fn wf_contained(wf: &WavefrontSet, set: &ConicRegionSet) -> Result<Containment> {
    if set.dim() != wf.set.dim() {
        return Err(Error::DimMismatch(
            "wave front and conic set dimensions differ".into(),
        ));
    }
    let target = if set.grid() == wf.set.grid() {
        set.clone()
    } else {
        set.resample(wf.set.grid())
    };
    let violations = wf.set.violations_against(&target, &wf.lattice)?;
    Ok(Containment {
        contained: violations.is_empty(),
        violations,
    })
}

/// `sing supp_r u`: the cells of `WF^r`.
pub fn sing_supp(
    u: &SpectralDistribution,
    r: f64,
    lattice: &CellLattice,
    cfg: &FitConfig,
) -> Result<SpatialRegion> {
    let wf = estimate_wavefront(u, r, lattice, cfg)?;
    Ok(lattice.region_of_cells(&wf.cells()))
}

/// Direction set of a wave front's grid resampled onto another grid.
pub fn resample_mask(mask: &DirectionSet, grid: &DirectionGrid) -> DirectionSet {
    resample_cone(mask, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synthesize, DistributionSpec};

    #[test]
    fn fit_range_default() {
        let cfg = FitConfig::default();
        assert_eq!(cfg.j_hi(4096), 9);
        assert_eq!(cfg.j_hi(256), 5);
    }

    #[test]
    fn delta_threshold_logic() {
        let g = GridSpec::new(1, 1024).unwrap();
        let lat = CellLattice::standard(1);
        let cfg = FitConfig::default();
        let u = synthesize(&DistributionSpec::delta(&[0.5]), &g).unwrap();
        let field = OrderField::compute(&u, &lat, &cfg).unwrap();
        let wf0 = field.wavefront(0.0);
        assert_eq!(wf0.members(), vec![(4, 0), (4, 1)]);
        assert!(field.wavefront(-1.0).is_empty());
        for cell in [0, 1, 2, 3, 5, 6, 7] {
            assert!(field.get(cell, 0).is_smooth());
        }
    }

    #[test]
    fn containment_witness() {
        let lat = CellLattice::standard(1);
        let wf = WavefrontSet {
            r: 0.0,
            set: ConicRegionSet::single(SpatialRegion::point(&[0.5]), DirectionSet::positive_ray()),
            lattice: lat,
            undecided: vec![],
        };
        let both = ConicRegionSet::single(
            SpatialRegion::point(&[0.5]),
            DirectionSet::full(DirectionGrid::Signs),
        );
        assert!(wf_contained(&wf, &both).unwrap().contained);
        let elsewhere =
            ConicRegionSet::single(SpatialRegion::point(&[0.3]), DirectionSet::positive_ray());
        let c = wf_contained(&wf, &elsewhere).unwrap();
        assert!(!c.contained);
        assert_eq!(c.violations, vec![(4, 1)]);
    }
}
