//! Executes a configuration: one report section per operation, artifacts under the output directory.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use microsob_core::conic::{catalog_wavefront, ConicRegionSet};
use microsob_core::directions::DirectionGrid;
use microsob_core::indices::IndexHypotheses;
use microsob_core::product::{consistency_check, multiply, ProductMode};
use microsob_core::seminorm::{max_tensor_order, tensor_seminorm_ratio};
use microsob_core::synth::central_window;
use microsob_core::wavefront::{
    estimate_global_order, estimate_wavefront, FitConfig, FitStatus, OrderField,
};
use microsob_core::{synthesize, CellLattice, DistributionSpec, GridSpec, SpectralDistribution};

use crate::config::{ExperimentConfig, Operation};
use crate::corpus;
use crate::plot;
use crate::report::{Check, VerificationReport};
use crate::suites::{self, SuiteContext};

pub const REPORT_FILE: &str = "report.json";
const ORDER_TOL: f64 = 0.15;
const TENSOR_RATIO_LIMIT: f64 = 1.05;
/// Direct convolution is quadratic in the number of coefficients; skip it above this size.
const DIRECT_CONVOLUTION_LIMIT: usize = 1 << 13;

#[derive(Debug)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.report.any_failed())
    }
}

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    grid: GridSpec,
    out: &'a Path,
    fit: FitConfig,
    artifacts: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn artifact(&mut self, name: String) -> PathBuf {
        let p = self.out.join(name);
        self.artifacts.push(p.clone());
        p
    }

    fn member(
        &self,
        name: &str,
    ) -> Result<(
        DistributionSpec,
        microsob_core::Result<SpectralDistribution>,
    )> {
        let spec = self.config.member(name)?;
        let field = synthesize(&spec, &self.grid);
        Ok((spec, field))
    }
}

/// Runs every operation in order; module errors become failing checks.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    config.validate()?;
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut ctx = Ctx {
        config,
        grid: config.grid_spec()?,
        out,
        fit: FitConfig::default(),
        artifacts: Vec::new(),
    };
    let mut report = VerificationReport::new(config.seed);
    for (i, op) in config.operations.iter().enumerate() {
        match op {
            Operation::Analyze { member, r } => {
                let check = analyze(&mut ctx, i, member, r.unwrap_or(1.0))?;
                report.push(&format!("analyze:{member}"), check);
            }
            Operation::Tensor { first, second } => {
                let check = tensor(&mut ctx, i, first, second)?;
                report.push(&format!("tensor:{first}x{second}"), check);
            }
            Operation::Multiply {
                first,
                second,
                hypotheses,
                mode,
                l1,
                l2,
                estimate,
                expect_error,
            } => {
                let h = config.hypothesis(hypotheses)?;
                let sets = (l1.as_deref(), l2.as_deref());
                let check = product(
                    &mut ctx,
                    i,
                    (first, second),
                    &h,
                    *mode,
                    sets,
                    *estimate,
                    expect_error.as_deref(),
                )?;
                report.push(&format!("multiply:{first}*{second}"), check);
            }
            Operation::VerifySuite { name } => {
                let sctx = SuiteContext { seed: config.seed };
                for suite in suites::SUITES
                    .iter()
                    .filter(|s| name == "all" || s.name == name)
                {
                    report.extend(suite.name, suite.run(&sctx));
                }
            }
        }
    }
    let path = ctx.artifact(REPORT_FILE.into());
    plot::write_json(&path, &report.to_json()?)?;
    if !report.is_empty() {
        let table = ctx.artifact("measurements.csv".into());
        plot::write_ratio_table(&report, &table)?;
    }
    Ok(RunOutcome {
        report,
        artifacts: ctx.artifacts,
    })
}

fn analyze(ctx: &mut Ctx, i: usize, name: &str, r: f64) -> Result<Check> {
    let (spec, field) = ctx.member(name)?;
    let check = Check::new(
        format!("analyze/{name}"),
        "global Sobolev order, order field and WF^r of a corpus member",
        &(&spec, ctx.grid, r, ctx.fit),
    );
    let u = match field {
        Ok(u) => u,
        Err(e) => return Ok(check.failed_with(&e)),
    };
    let lattice = CellLattice::standard(u.dim());
    let analysed = estimate_global_order(&u, &ctx.fit)
        .and_then(|g| Ok((g, OrderField::compute(&u, &lattice, &ctx.fit)?)));
    let (global, orders) = match analysed {
        Ok(x) => x,
        Err(e) => return Ok(check.failed_with(&e)),
    };
    let wf = orders.wavefront(r);
    plot::write_order_heatmap(&orders, &ctx.artifact(format!("{i:02}-{name}-orders.csv")))?;
    plot::write_annulus_profile(&u, &ctx.artifact(format!("{i:02}-{name}-profile.csv")))?;
    plot::write_wavefront(&wf, &ctx.artifact(format!("{i:02}-{name}-wavefront.csv")))?;
    let check = check
        .measure("global_order", global.value())
        .measure("wavefront_members", wf.members().len() as f64)
        .measure("undecided_entries", orders.undecided().len() as f64)
        .note(format!("WF^{r} cells {:?}", wf.cells()));
    Ok(match (global.status, spec.analytic_order()) {
        (FitStatus::Undecided, _) => check.undecided(),
        (_, Some(exact)) => check
            .measure("analytic_order", exact)
            .tolerance(format!("|ŝ - s| <= {ORDER_TOL}"))
            .verdict((global.value() - exact).abs() <= ORDER_TOL),
        (_, None) if spec.is_smooth() => check.tolerance("smooth flag").verdict(global.is_smooth()),
        (_, None) => check.tolerance("informational").verdict(true),
    })
}

fn tensor(ctx: &mut Ctx, i: usize, first: &str, second: &str) -> Result<Check> {
    let (sa, fa) = ctx.member(first)?;
    let (sb, fb) = ctx.member(second)?;
    let (rp, rpp) = (
        corpus::assumed_order(&sa, 0.1, 2.0),
        corpus::assumed_order(&sb, 0.1, 2.0),
    );
    let s = max_tensor_order(rp, rpp);
    let check = Check::new(
        format!("tensor/{first}x{second}"),
        "q_{s;φ⊗ψ}(u⊗v) <= C q_{r';φ}(u) q_{r'';ψ}(v) at s = min{r'+min{0,r''}, r''+min{0,r'}}",
        &(&sa, &sb, ctx.grid, rp, rpp),
    );
    let (u, v) = match (fa, fb) {
        (Ok(u), Ok(v)) => (u, v),
        (Err(e), _) | (_, Err(e)) => return Ok(check.failed_with(&e)),
    };
    let window = central_window(u.dim());
    let ratio = match tensor_seminorm_ratio(&u, &v, &window, &window, s, rp, rpp) {
        Ok(r) => r,
        Err(e) => return Ok(check.failed_with(&e)),
    };
    if u.dim() == 1 {
        match OrderField::compute_tensor(&u, &v, &ctx.fit) {
            Ok(field) => plot::write_order_heatmap(
                &field,
                &ctx.artifact(format!("{i:02}-{first}x{second}-orders.csv")),
            )?,
            Err(e) => return Ok(check.failed_with(&e)),
        }
    }
    Ok(check
        .measure("r_prime", rp)
        .measure("r_double_prime", rpp)
        .measure("s", s)
        .measure("lhs", ratio.lhs)
        .measure("rhs", ratio.rhs)
        .measure("ratio", ratio.ratio)
        .tolerance(format!("ratio <= {TENSOR_RATIO_LIMIT}"))
        .verdict(ratio.ratio <= TENSOR_RATIO_LIMIT))
}

#[allow(clippy::too_many_arguments)]
fn product(
    ctx: &mut Ctx,
    i: usize,
    (first, second): (&str, &str),
    h: &IndexHypotheses,
    mode: ProductMode,
    sets: (Option<&str>, Option<&str>),
    estimate: bool,
    expect_error: Option<&str>,
) -> Result<Check> {
    let (sa, fa) = ctx.member(first)?;
    let (sb, fb) = ctx.member(second)?;
    let mut check = Check::new(
        format!("multiply/{first}*{second}"),
        "uv = δ*(u⊗v) under the index and wave front gates",
        &(&sa, &sb, ctx.grid, h, mode, sets, estimate),
    );
    if let Some(kind) = expect_error {
        check = check
            .expected_reject()
            .tolerance(format!("rejected with {kind}"));
    }
    let (u, v) = match (fa, fb) {
        (Ok(u), Ok(v)) => (u, v),
        (Err(e), _) | (_, Err(e)) => return Ok(check.failed_with(&e)),
    };
    let lattice = CellLattice::standard(u.dim());
    let wavefront_of =
        |spec: &DistributionSpec, f: &SpectralDistribution, name: Option<&str>, r: f64| {
            if let Some(n) = name {
                return Ok(ctx.config.conic_set(n)?);
            }
            if estimate {
                return Ok(estimate_wavefront(f, r, &lattice, &ctx.fit)?.set);
            }
            Ok::<ConicRegionSet, anyhow::Error>(catalog_wavefront(
                spec,
                &DirectionGrid::for_dim(spec.dim()),
            ))
        };
    let l1 = wavefront_of(&sa, &u, sets.0, h.r1)?;
    let l2 = wavefront_of(&sb, &v, sets.1, h.r2)?;
    let outcome = match multiply(&u, &v, &l1, &l2, h, mode) {
        Ok(o) => o,
        Err(e) => {
            let expected = expect_error == Some(e.kind());
            return Ok(check.note(e.to_string()).verdict(expected));
        }
    };
    if let Some(kind) = expect_error {
        return Ok(check
            .note(format!("accepted, expected {kind}"))
            .verdict(false));
    }
    let stem = format!("{i:02}-{first}x{second}");
    plot::write_json(
        &ctx.artifact(format!("{stem}-certificate.json")),
        &outcome.cert.to_json()?,
    )?;
    let mut check = check
        .measure("s_star", outcome.cert.s_star)
        .measure("r_star", outcome.cert.r_star)
        .measure(
            "product_global_order",
            estimate_global_order(&outcome.product, &ctx.fit).map_or(f64::NAN, |e| e.value()),
        )
        .tolerance("gates pass");
    if let Some(r) = outcome.cert.r {
        check = check.measure("r", r);
    }
    if u.grid().len() <= DIRECT_CONVOLUTION_LIMIT {
        check = check.measure(
            "consistency",
            consistency_check(&u, &v).map_or(f64::NAN, |d| d),
        );
    }
    match OrderField::compute(&outcome.product, &lattice, &ctx.fit) {
        Ok(field) => {
            plot::write_order_heatmap(&field, &ctx.artifact(format!("{stem}-orders.csv")))?
        }
        Err(e) => return Ok(check.failed_with(&e)),
    }
    Ok(check.verdict(true))
}
