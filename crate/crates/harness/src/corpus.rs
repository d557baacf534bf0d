//! Named corpus members used by the suites.

use microsob_core::synth::CapSpec;
use microsob_core::DistributionSpec;

pub const X0: f64 = 0.5;

pub fn delta() -> DistributionSpec {
    DistributionSpec::delta(&[X0])
}

pub fn heaviside() -> DistributionSpec {
    DistributionSpec::heaviside(&[X0])
}

pub fn one_sided() -> DistributionSpec {
    DistributionSpec::one_sided_power(0.75, X0)
}

pub fn gaussian() -> DistributionSpec {
    DistributionSpec::gaussian(&[X0], 0.05)
}

/// The one-dimensional members with their labels.
pub fn standard_1d() -> Vec<(&'static str, DistributionSpec)> {
    vec![
        ("delta", delta()),
        ("heaviside", heaviside()),
        ("one_sided", one_sided()),
        ("gaussian", gaussian()),
    ]
}

/// Extra members for seminorm checks and demos.
pub fn extended_1d() -> Vec<(&'static str, DistributionSpec)> {
    let mut out = standard_1d();
    out.push((
        "power_0.3",
        DistributionSpec::PowerSingularity {
            a: 0.3,
            x0: vec![X0],
        },
    ));
    out.push((
        "custom_1.2",
        DistributionSpec::CustomSpectral {
            decay: 1.2,
            x0: vec![X0],
            cone: None,
        },
    ));
    out
}

pub fn standard_2d() -> Vec<(&'static str, DistributionSpec)> {
    vec![
        ("delta", DistributionSpec::delta(&[X0, X0])),
        ("heaviside", DistributionSpec::heaviside(&[X0, X0])),
        ("gaussian", DistributionSpec::gaussian(&[X0, X0], 0.05)),
        (
            "custom_cone",
            DistributionSpec::CustomSpectral {
                decay: 1.5,
                x0: vec![X0, X0],
                cone: Some(CapSpec {
                    centers: vec![0.0],
                    half_angle: 30f64.to_radians(),
                }),
            },
        ),
    ]
}

/// Global order assumed for a member: a little below the analytic value, or a fixed order for smooth members.
pub fn assumed_order(spec: &DistributionSpec, below: f64, smooth: f64) -> f64 {
    spec.analytic_order().map_or(smooth, |s| s - below)
}

/// A built-in member by label; two-dimensional members carry a `2d` suffix.
pub fn lookup(label: &str) -> Option<DistributionSpec> {
    if let Some(base) = label.strip_suffix("2d") {
        return standard_2d()
            .into_iter()
            .find(|(l, _)| *l == base.trim_end_matches('_'))
            .map(|(_, s)| s);
    }
    extended_1d()
        .into_iter()
        .find(|(l, _)| *l == label)
        .map(|(_, s)| s)
}

pub fn labels() -> Vec<String> {
    let mut out: Vec<String> = extended_1d().iter().map(|(l, _)| l.to_string()).collect();
    out.extend(standard_2d().iter().map(|(l, _)| format!("{l}2d")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_label_resolves() {
        for l in labels() {
            assert!(lookup(&l).is_some(), "{l}");
        }
        assert_eq!(lookup("delta2d").unwrap().dim(), 2);
        assert!(lookup("cantor").is_none());
    }
}
