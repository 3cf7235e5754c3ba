//! Verification suites. Each check compares a computed quantity with an
//! independent reference and records the outcome; failures are data, not
//! errors. Entries appear in declaration order regardless of how the work
//! inside a check is scheduled, so reports are byte-identical across thread
//! counts. Wall-clock timings are returned separately.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::engine::{
    parseval_check, reproduce, sdwt_forward, sdwt_forward_fourier, signal_spectrum, ErrorMode, QuadratureSpec,
};
use crate::error::{Result, SdwtError};
use crate::fock::{
    build_u_normal_ordered, build_u_quadrature, eigen_residuals, eta_ecs_overlap, eta_ecs_overlap_closed, quantum_sdwt,
    resolution_identity_check, EtaLabel, FockOperator, FockSpace, FockVector, FockWavelet,
};
use crate::kernel::{
    abcd_from_sr, kernel_compose, kernel_eval, smeared_element_closed, smeared_element_fock, sr_from_abcd,
    sr_matrix_element, ABCDMatrix, LensFresnelKernel, Smearing,
};
use crate::model::{symplectic_from_hyperbolic, Grid3D, SampledField, TransformPoint, C64};
use crate::signals::{windowed_plane_wave, GaussianPacket, GaussianPolynomial};
use crate::wavelet::{admissibility_integral, eval_family, normalize_admissible, spectrum, MotherWavelet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Transform,
    Parseval,
    Inversion,
    Admissibility,
    Fock,
    Kernel,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "transform",
        "parseval",
        "inversion",
        "admissibility",
        "fock",
        "kernel",
        "all",
    ];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = SdwtError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "transform" => Suite::Transform,
            "parseval" => Suite::Parseval,
            "inversion" => Suite::Inversion,
            "admissibility" => Suite::Admissibility,
            "fock" => Suite::Fock,
            "kernel" => Suite::Kernel,
            "all" => Suite::All,
            _ => {
                return Err(SdwtError::Parse(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [
            Suite::Transform,
            Suite::Parseval,
            Suite::Inversion,
            Suite::Admissibility,
            Suite::Fock,
            Suite::Kernel,
            Suite::All,
        ]
        .iter()
        .position(|s| s == self)
        .expect("listed");
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check: String,
    pub anchor: String,
    /// `None` when the check could not be evaluated; `note` then holds the error.
    pub computed: Option<f64>,
    pub reference: f64,
    /// `None` for informational entries, which always pass.
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub note: String,
}

impl ReportEntry {
    /// Passes when `|computed - reference| <= tolerance`.
    fn within(check: String, anchor: &str, computed: f64, reference: f64, tolerance: f64, note: String) -> Self {
        ReportEntry {
            pass: (computed - reference).abs() <= tolerance,
            check,
            anchor: anchor.into(),
            computed: Some(computed),
            reference,
            tolerance: Some(tolerance),
            note,
        }
    }

    /// Passes when `computed <= tolerance`; for errors and residuals.
    fn at_most(check: String, anchor: &str, computed: f64, tolerance: f64, note: String) -> Self {
        ReportEntry {
            pass: computed <= tolerance,
            check,
            anchor: anchor.into(),
            computed: Some(computed),
            reference: 0.0,
            tolerance: Some(tolerance),
            note,
        }
    }

    /// Passes when the sequence strictly decreases; `computed` is the largest
    /// step `s[i+1] - s[i]`.
    fn decreasing(check: String, anchor: &str, seq: &[f64]) -> Self {
        let step = seq.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        ReportEntry {
            pass: step < 0.0,
            check,
            anchor: anchor.into(),
            computed: Some(step),
            reference: 0.0,
            tolerance: Some(0.0),
            note: format!("sequence {}", fmt_seq(seq)),
        }
    }

    fn info(check: String, anchor: &str, computed: f64, note: String) -> Self {
        ReportEntry {
            pass: true,
            check,
            anchor: anchor.into(),
            computed: Some(computed),
            reference: 0.0,
            tolerance: None,
            note,
        }
    }

    fn failed(check: &str, anchor: &str, err: &SdwtError) -> Self {
        ReportEntry {
            pass: false,
            check: check.into(),
            anchor: anchor.into(),
            computed: None,
            reference: 0.0,
            tolerance: None,
            note: format!("{}: {err}", err.kind()),
        }
    }
}

fn fmt_seq(seq: &[f64]) -> String {
    let parts: Vec<String> = seq.iter().map(|v| format!("{v:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Entries whose check name starts with `prefix`.
    pub fn entries_for<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a ReportEntry> + 'a {
        self.entries.iter().filter(move |e| e.check.starts_with(prefix))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub check: String,
    pub seconds: f64,
}

struct Check {
    name: &'static str,
    anchor: &'static str,
    suite: Suite,
    run: fn(&Check, &RunConfig) -> Result<Vec<ReportEntry>>,
}

impl Check {
    fn entry(&self, label: impl fmt::Display) -> String {
        format!("{}/{label}", self.name)
    }
}

const CHECKS: &[Check] = &[
    Check {
        name: "exponential-closed-form",
        anchor: "exponential-signal-transform",
        suite: Suite::Transform,
        run: exponential_closed_form,
    },
    Check {
        name: "path-equivalence",
        anchor: "fourier-path-transform",
        suite: Suite::Transform,
        run: path_equivalence,
    },
    Check {
        name: "parseval",
        anchor: "parseval-identity",
        suite: Suite::Parseval,
        run: parseval,
    },
    Check {
        name: "inversion",
        anchor: "inversion-formula",
        suite: Suite::Inversion,
        run: inversion,
    },
    Check {
        name: "delta-reproducing",
        anchor: "delta-reproducing-kernel",
        suite: Suite::Inversion,
        run: delta_reproducing,
    },
    Check {
        name: "admissibility",
        anchor: "admissibility-condition",
        suite: Suite::Admissibility,
        run: admissibility,
    },
    Check {
        name: "ecs-eigen",
        anchor: "entangled-coherent-eigen-relations",
        suite: Suite::Fock,
        run: ecs_eigen,
    },
    Check {
        name: "completeness",
        anchor: "entangled-coherent-completeness",
        suite: Suite::Fock,
        run: completeness,
    },
    Check {
        name: "eta-overlap",
        anchor: "eta-ecs-overlap",
        suite: Suite::Fock,
        run: eta_overlap,
    },
    Check {
        name: "operator-identity",
        anchor: "normal-ordered-squeezing-operator",
        suite: Suite::Fock,
        run: operator_identity,
    },
    Check {
        name: "quantum-classical",
        anchor: "quantum-matrix-element-form",
        suite: Suite::Fock,
        run: quantum_classical,
    },
    Check {
        name: "abcd-algebra",
        anchor: "abcd-parametrization",
        suite: Suite::Kernel,
        run: abcd_algebra,
    },
    Check {
        name: "kernel-identity",
        anchor: "lens-fresnel-kernel",
        suite: Suite::Kernel,
        run: kernel_identity,
    },
    Check {
        name: "kernel-composition",
        anchor: "abcd-group-composition",
        suite: Suite::Kernel,
        run: kernel_composition,
    },
];

/// Names of the checks a suite runs, in report order.
pub fn suite_checks(suite: Suite) -> Vec<&'static str> {
    CHECKS
        .iter()
        .filter(|c| suite.includes(c.suite))
        .map(|c| c.name)
        .collect()
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> (VerificationReport, Vec<Timing>) {
    let checks: Vec<&Check> = CHECKS.iter().filter(|c| suite.includes(c.suite)).collect();
    run_checks(suite.to_string(), &checks, cfg)
}

/// Runs the named checks, in declaration order, under the report label `label`.
pub fn run_named(label: &str, names: &[&str], cfg: &RunConfig) -> Result<(VerificationReport, Vec<Timing>)> {
    if let Some(bad) = names.iter().find(|n| !CHECKS.iter().any(|c| c.name == **n)) {
        return Err(SdwtError::Parse(format!("unknown check {bad:?}")));
    }
    let checks: Vec<&Check> = CHECKS.iter().filter(|c| names.contains(&c.name)).collect();
    Ok(run_checks(label.to_string(), &checks, cfg))
}

fn run_checks(label: String, checks: &[&Check], cfg: &RunConfig) -> (VerificationReport, Vec<Timing>) {
    let mut entries = Vec::new();
    let mut timings = Vec::new();
    for check in checks {
        let start = Instant::now();
        match (check.run)(check, cfg) {
            Ok(es) => entries.extend(es),
            Err(e) => entries.push(ReportEntry::failed(check.name, check.anchor, &e)),
        }
        timings.push(Timing {
            check: check.name.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    (
        VerificationReport {
            suite: label,
            seed: cfg.seed,
            pass,
            entries,
        },
        timings,
    )
}

fn rng(cfg: &RunConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn direct_no_estimate() -> QuadratureSpec {
    QuadratureSpec {
        error_mode: ErrorMode::None,
        ..QuadratureSpec::direct()
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Windowed plane wave at `(beta, p) = (0.5, 1)` against
/// `sqrt(s |a|) conj(Phi) e^{kappa* beta - kappa beta* - i p b}` for real `s, r`.
fn exponential_closed_form(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let w = cfg.wavelet.build()?;
    let grid = Grid3D::centered(8.0, 72, 8.0, 72)?;
    let (beta, p) = (C64::new(0.5, 0.0), 1.0);
    let g = windowed_plane_wave(grid, beta, p);
    let mut r = rng(cfg, 1);
    let mut out = Vec::new();
    for k in 0..5 {
        let theta = if r.random_bool(0.5) { 0.0 } else { PI };
        let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let tp = TransformPoint::from_hyperbolic(
            r.random_range(0.0..0.6),
            0.0,
            theta,
            C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
            sign * r.random_range(0.7..1.5),
            r.random_range(-1.0..1.0),
        )?;
        let got = sdwt_forward(&g, w.as_ref(), &tp, &direct_no_estimate())?.value;
        let (s, a) = (tp.sym.s(), tp.dil.a());
        let phi = spectrum(w.as_ref(), tp.sym.spectral_arg(beta), a * p)?;
        let kappa = tp.tr.kappa;
        let phase = (kappa.conj() * beta - kappa * beta.conj() - C64::new(0.0, p * tp.dil.b())).exp();
        let want = (s * a.abs()).sqrt() * phi.conj() * phase;
        out.push(ReportEntry::at_most(
            c.entry(format!("point-{k}")),
            c.anchor,
            rel(got, want),
            1e-3,
            "relative error of the direct transform".into(),
        ));
    }
    Ok(out)
}

/// Direct rectangle rule against the spectrum-weighted sum on random
/// Gaussian-polynomial signals.
fn path_equivalence(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let w = cfg.wavelet.build()?;
    let grid = Grid3D::centered(6.0, 40, 7.0, 48)?;
    let fq = QuadratureSpec {
        pad: cfg.quadrature.pad.max(3),
        ..Default::default()
    };
    let mut r = rng(cfg, 2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let sig = GaussianPolynomial::random(&mut r);
        let tp = TransformPoint::from_hyperbolic(
            r.random_range(0.0..0.8),
            r.random_range(0.0..2.0 * PI),
            r.random_range(0.0..2.0 * PI),
            C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
            r.random_range(0.5..2.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 },
            r.random_range(-1.0..1.0),
        )?;
        let g = sig.sample(grid);
        let d = sdwt_forward(&g, w.as_ref(), &tp, &direct_no_estimate())?.value;
        let f = sdwt_forward_fourier(&signal_spectrum(&g, &fq), w.as_ref(), &tp)?;
        worst = worst.max(rel(f, d));
    }
    Ok(vec![ReportEntry::at_most(
        c.entry("max-over-20-signals"),
        c.anchor,
        worst,
        1e-4,
        "largest relative gap between direct and Fourier paths".into(),
    )])
}

fn normalized_wavelet(cfg: &RunConfig) -> Result<Arc<dyn MotherWavelet>> {
    let w = cfg.wavelet.build()?;
    Ok(Arc::new(normalize_admissible(
        w,
        C64::new(1.0, 0.0),
        1.0,
        cfg.sampling.theta,
        &cfg.admissibility_cutoffs(),
    )?))
}

/// Gaussian packets near the normalization point `(beta, p) = (1, 1)`.
fn parseval_pairs() -> [(GaussianPacket, GaussianPacket); 5] {
    let base = GaussianPacket::default();
    let b2 = GaussianPacket {
        beta0: C64::new(0.0, 1.0),
        ..base
    };
    let b3 = GaussianPacket {
        beta0: C64::new(0.8, 0.6),
        p0: 1.2,
        ..base
    };
    let b4 = GaussianPacket { p0: -1.0, ..base };
    [
        (base, base),
        (
            base,
            GaussianPacket {
                alpha0: C64::new(0.5, 0.0),
                ..base
            },
        ),
        (b2, GaussianPacket { x0: 0.5, ..b2 }),
        (
            b3,
            GaussianPacket {
                alpha0: C64::new(0.0, 0.4),
                ..b3
            },
        ),
        (
            b4,
            GaussianPacket {
                x0: -0.3,
                alpha0: C64::new(-0.3, 0.2),
                ..b4
            },
        ),
    ]
}

/// `lhs / rhs` of the Parseval identity at the configured sampling and two
/// refinements. The pass test is on the real part; the imaginary part, a
/// phase error from the non-constant frame multiplier, is reported.
fn parseval(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let w = normalized_wavelet(cfg)?;
    let grid = cfg.grid.build()?;
    let samplings = (0..3)
        .map(|l| cfg.sampling.refined(l).resolve(&grid))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (k, (p1, p2)) in parseval_pairs().iter().enumerate() {
        let (g1, g2) = (p1.sample(grid), p2.sample(grid));
        let mut gaps = Vec::new();
        for (level, s) in samplings.iter().enumerate() {
            let rep = parseval_check(&g1, &g2, w.as_ref(), s, &cfg.quadrature)?;
            let ratio = rep.lhs / rep.rhs;
            if level == 0 {
                out.push(ReportEntry::within(
                    c.entry(format!("pair-{k}/ratio")),
                    c.anchor,
                    ratio.re,
                    1.0,
                    0.05,
                    "Re(lhs/rhs) at the configured sampling".into(),
                ));
                out.push(ReportEntry::info(
                    c.entry(format!("pair-{k}/ratio-imag")),
                    c.anchor,
                    ratio.im,
                    "Im(lhs/rhs)".into(),
                ));
            }
            gaps.push((ratio.re - 1.0).abs());
        }
        out.push(ReportEntry::decreasing(
            c.entry(format!("pair-{k}/refinement")),
            c.anchor,
            &gaps,
        ));
    }
    Ok(out)
}

/// Round trip of a Gaussian through the reproducing process, compared on
/// the central half of the domain.
fn inversion(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let w = normalized_wavelet(cfg)?;
    let grid = cfg.grid.build()?;
    let g = GaussianPacket::default().sample(grid);
    let mut out = Vec::new();
    for (level, tol) in [(0usize, 0.05), (1, 0.025)] {
        let s = cfg.sampling.refined(level).resolve(&grid)?;
        let back = reproduce(&g, w.as_ref(), &s, &cfg.quadrature)?;
        out.push(ReportEntry::at_most(
            c.entry(format!("level-{level}")),
            c.anchor,
            back.relative_l2_error(&g, 0.5),
            tol,
            "relative L2 error on the central half-domain".into(),
        ));
    }
    Ok(out)
}

/// Transform of an off-node grid delta against the family member at the
/// delta's position, as a function of the parameter point, on the configured grid and on the nested grid with half
/// the step.
fn delta_reproducing(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let w = cfg.wavelet.build()?;
    let (alpha, x) = (C64::new(0.31, -0.17), 0.23);
    let mut r = rng(cfg, 5);
    let points = (0..8)
        .map(|_| {
            TransformPoint::from_hyperbolic(
                r.random_range(0.0..0.6),
                r.random_range(0.0..2.0 * PI),
                r.random_range(0.0..2.0 * PI),
                C64::new(r.random_range(-0.5..0.5), r.random_range(-0.5..0.5)),
                r.random_range(0.8..1.5) * if r.random_bool(0.5) { 1.0 } else { -1.0 },
                r.random_range(-0.5..0.5),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let coarse = cfg.grid.build()?;
    let halve = |a: crate::model::Axis| crate::model::Axis::symmetric(a.center, a.radius(), 2 * a.count - 1);
    let fine = Grid3D::new(halve(coarse.alpha1)?, halve(coarse.alpha2)?, halve(coarse.x)?);
    let mut errs = Vec::new();
    for grid in [coarse, fine] {
        let g = SampledField::grid_delta(grid, alpha, x)?;
        let mut gap = 0.0f64;
        let mut scale = 0.0f64;
        for tp in &points {
            let got = sdwt_forward(&g, w.as_ref(), tp, &direct_no_estimate())?.value;
            let want = eval_family(w.as_ref(), tp, alpha, x).conj() / (2.0 * PI * PI.sqrt());
            gap = gap.max((got - want).norm());
            scale = scale.max(want.norm());
        }
        errs.push(gap / scale);
    }
    Ok(vec![
        ReportEntry::at_most(
            c.entry("coarse"),
            c.anchor,
            errs[0],
            0.02,
            "max gap over 8 parameter points relative to the largest reference value, configured grid".into(),
        ),
        ReportEntry::at_most(
            c.entry("step-halving"),
            c.anchor,
            errs[1] / errs[0],
            0.5,
            format!("error ratio after halving the step, errors {}", fmt_seq(&errs)),
        ),
    ])
}

fn admissibility(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let w = normalized_wavelet(cfg)?;
    let cut = cfg.admissibility_cutoffs();
    let theta = cfg.sampling.theta;
    let at_one = admissibility_integral(w.as_ref(), C64::new(1.0, 0.0), 1.0, theta, &cut)?;
    let mut out = vec![ReportEntry::within(
        c.entry("normalized"),
        c.anchor,
        at_one.value,
        1.0,
        1e-3,
        "integral at (beta, p) = (1, 1) after normalization".into(),
    )];
    let grid: Vec<(f64, f64)> = [0.5, 1.0, 2.0]
        .iter()
        .flat_map(|b| [0.5, 1.0, 2.0].iter().map(move |p| (*b, *p)))
        .collect();
    let values = grid
        .par_iter()
        .map(|(b, p)| admissibility_integral(w.as_ref(), C64::new(*b, 0.0), *p, theta, &cut).map(|a| a.value))
        .collect::<Result<Vec<f64>>>()?;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    out.push(ReportEntry::info(
        c.entry("variation"),
        c.anchor,
        hi - lo,
        format!("max - min over |beta|, p in {{0.5, 1, 2}}: values {}", fmt_seq(&values)),
    ));
    Ok(out)
}

fn ecs_eigen(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let labels: Vec<(C64, f64)> = [
        C64::new(0.0, 0.0),
        C64::new(0.7, 0.7),
        C64::new(-1.0, 0.0),
        C64::new(0.3, -0.6),
    ]
    .iter()
    .flat_map(|a| [-1.0, 0.0, 0.7].iter().map(move |x| (*a, *x)))
    .collect();
    let top = cfg.fock.state_cutoff;
    let cutoffs = [top / 2, 3 * top / 4, top];
    let mut weak = Vec::new();
    let mut interior = 0.0f64;
    for &n in &cutoffs {
        let space = FockSpace::new(n)?;
        let res = labels
            .par_iter()
            .map(|(a, x)| eigen_residuals(*a, *x, space))
            .collect::<Result<Vec<_>>>()?;
        weak.push(
            res.iter()
                .map(|r| r.weak_difference.max(r.weak_coordinate))
                .fold(0.0, f64::max),
        );
        if n == top {
            interior = res
                .iter()
                .map(|r| r.interior_difference.max(r.interior_coordinate))
                .fold(0.0, f64::max);
        }
    }
    Ok(vec![
        ReportEntry::at_most(
            c.entry(format!("weak-residual-N{top}")),
            c.anchor,
            weak[2],
            1e-8,
            "largest residual against coherent probes, |alpha|, |x| <= 1".into(),
        ),
        ReportEntry::decreasing(c.entry(format!("cutoff-sweep-{:?}", cutoffs)), c.anchor, &weak),
        ReportEntry::info(
            c.entry(format!("interior-residual-N{top}")),
            c.anchor,
            interior,
            "largest residual entry away from the truncation edge".into(),
        ),
    ])
}

fn completeness(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let space = FockSpace::new(16)?;
    let quad = crate::fock::FockQuadrature {
        nodes: 48,
        min_radius: cfg.fock.min_radius,
    };
    let r = resolution_identity_check(space, &quad, 4)?;
    Ok(vec![
        ReportEntry::at_most(
            c.entry("block-deviation"),
            c.anchor,
            r.max_deviation,
            1e-3,
            "max |M - I| on n1 + n2 <= 4, N = 16, 48 nodes per axis".into(),
        ),
        ReportEntry::at_most(
            c.entry("diagonal"),
            c.anchor,
            r.max_diagonal_deviation,
            1e-3,
            "max |M_nn - 1| on the block".into(),
        ),
        ReportEntry::at_most(
            c.entry("entry-00-10"),
            c.anchor,
            r.entry_00_10.norm(),
            1e-3,
            "|<00|M|10>|".into(),
        ),
    ])
}

fn eta_overlap(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let space = cfg.fock.state_space()?;
    let alpha = C64::new(0.5, -0.4);
    let axis = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut sample = Vec::with_capacity(125);
    for &e1 in &axis {
        for &e2 in &axis {
            for &x in &axis {
                sample.push((e1, e2, x));
            }
        }
    }
    let gaps = sample
        .par_iter()
        .map(|&(e1, e2, x)| {
            let eta = EtaLabel::new(e1, e2)?;
            Ok((eta_ecs_overlap(eta, alpha, x, space)? - eta_ecs_overlap_closed(eta, alpha, x)).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![ReportEntry::at_most(
        c.entry(format!("max-gap-N{}", space.cutoff())),
        c.anchor,
        gaps.iter().cloned().fold(0.0, f64::max),
        1e-6,
        "5x5x5 sample of (eta1, eta2, x) in [-1, 1], alpha = 0.5 - 0.4i".into(),
    )])
}

fn operator_identity(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let space = cfg.fock.operator_space()?;
    let quad = cfg.fock.quadrature();
    let mut out = Vec::new();
    for (k, &(mu, theta, a)) in [(0.3, 0.0, 1.5), (0.2, PI, 0.8), (0.5, 0.0, 1.2)].iter().enumerate() {
        let tp = TransformPoint::from_hyperbolic(mu, 0.0, theta, C64::new(0.0, 0.0), a, 0.0)?;
        let quadrature = build_u_quadrature(&tp, space, &quad)?;
        let normal = build_u_normal_ordered(tp.sym.s(), tp.sym.r(), a, space)?;
        out.push(ReportEntry::at_most(
            c.entry(format!("set-{k}")),
            c.anchor,
            quadrature.block_deviation(&normal, 3),
            1e-3,
            format!("mu = {mu}, theta = {theta:.6}, a = {a}: max gap on n1 + n2 <= 3"),
        ));
    }
    let id = build_u_quadrature(&TransformPoint::identity(), space, &quad)?;
    out.push(ReportEntry::at_most(
        c.entry("identity-point"),
        c.anchor,
        id.block_deviation(&FockOperator::identity(space), 3),
        1e-3,
        "quadrature operator at the identity point against I".into(),
    ));
    Ok(out)
}

fn quantum_classical(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let space = FockSpace::new(3)?;
    let quad = cfg.fock.quadrature();
    let mut r = rng(cfg, 11);
    let mut random_state = || {
        let mut v = FockVector::zeros(space);
        for i in space.low_block(2) {
            v.amplitudes[i] = C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        }
        v
    };
    let fixtures = [
        (
            FockVector::basis(space, 0, 0),
            FockVector::basis(space, 1, 0),
            TransformPoint::from_hyperbolic(0.2, 0.0, 0.0, C64::new(0.0, 0.0), 1.25, 0.0)?,
        ),
        (
            random_state(),
            random_state(),
            TransformPoint::from_hyperbolic(0.2, 0.3, 0.0, C64::new(0.1, -0.2), 1.25, 0.3)?,
        ),
    ];
    let grid = Grid3D::centered(9.0, 96, 9.0, 96)?;
    let mut out = Vec::new();
    for (k, (psi, g, tp)) in fixtures.iter().enumerate() {
        let quantum = quantum_sdwt(psi, g, tp, &quad)?;
        let gf = SampledField::from_fn(grid, |al, x| crate::fock::ecs_amplitudes(al, x, space).inner(g));
        let w = FockWavelet { state: psi.clone() };
        let classical = sdwt_forward(&gf, &w, tp, &direct_no_estimate())?.value;
        out.push(ReportEntry::at_most(
            c.entry(format!("fixture-{k}")),
            c.anchor,
            (quantum - classical).norm() / classical.norm().max(1.0),
            1e-3,
            "|<psi|U|g> - classical| / max(1, |classical|)".into(),
        ));
    }
    Ok(out)
}

fn abcd_algebra(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let mut r = rng(cfg, 12);
    let mut round = 0.0f64;
    let mut unimod = 0.0f64;
    for _ in 0..1000 {
        let sym = symplectic_from_hyperbolic(
            r.random_range(0.0..2.0),
            r.random_range(0.0..2.0 * PI),
            r.random_range(0.0..2.0 * PI),
        )?;
        let m = abcd_from_sr(sym.s(), sym.r())?;
        unimod = unimod.max((m.det() - 1.0).abs());
        let back = sr_from_abcd(&m)?;
        round = round.max((back.s() - sym.s()).norm().max((back.r() - sym.r()).norm()));
    }
    Ok(vec![
        ReportEntry::at_most(
            c.entry("round-trip"),
            c.anchor,
            round,
            1e-12,
            "max |(s, r) -> ABCD -> (s, r) - (s, r)| over 1000 surface points".into(),
        ),
        ReportEntry::at_most(
            c.entry("unimodularity"),
            c.anchor,
            unimod,
            1e-12,
            "max |AD - BC - 1| over the same points".into(),
        ),
    ])
}

fn kernel_identity(c: &Check, cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let mut r = rng(cfg, 13);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let sym = symplectic_from_hyperbolic(
            r.random_range(0.0..1.5),
            r.random_range(0.0..2.0 * PI),
            r.random_range(0.0..2.0 * PI),
        )?;
        let a = r.random_range(0.2..4.0);
        let k = LensFresnelKernel::from_sr(sym.s(), sym.r(), a)?;
        if k.abcd.b.abs() < 1e-3 {
            continue;
        }
        let (e1, e1p) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let x = kernel_eval(&k, e1, e1p)?;
        let y = sr_matrix_element(sym.s(), sym.r(), a, e1, e1p)?;
        worst = worst.max((x - y).norm() / x.norm().max(1.0));
        checked += 1;
    }
    let sym = symplectic_from_hyperbolic(0.4, 0.2, 0.0)?;
    let a = 1.3;
    let f = Smearing {
        center: C64::new(0.3, 0.2),
        sigma: 1.0,
    };
    let g = Smearing {
        center: C64::new(-0.2, 0.1),
        sigma: 1.0,
    };
    let closed = smeared_element_closed(sym.s(), sym.r(), a, &f, &g, 121, 9.0)?;
    let space = FockSpace::new(20)?;
    let fock = smeared_element_fock(sym.s(), sym.r(), a, &f, &g, space, &cfg.fock.quadrature())?;
    Ok(vec![
        ReportEntry::at_most(
            c.entry("closed-forms"),
            c.anchor,
            worst,
            1e-10,
            "two closed forms of the eta1 factor at 100 random points".into(),
        ),
        ReportEntry::at_most(
            c.entry("fock-smeared-N20"),
            c.anchor,
            (fock - closed).norm() / closed.norm(),
            1e-2,
            format!("Gaussian-smeared element, Fock {fock:.6e} vs closed {closed:.6e}"),
        ),
    ])
}

/// Two-step numerical propagation of a Gaussian against the composed kernel,
/// compared in modulus on 64 output points.
fn kernel_composition(c: &Check, _cfg: &RunConfig) -> Result<Vec<ReportEntry>> {
    let k1 = LensFresnelKernel::new(ABCDMatrix::new(1.0, 1.0, 0.0, 1.0)?, 1.2)?;
    let sym = symplectic_from_hyperbolic(0.4, 0.2, 0.0)?;
    let k2 = LensFresnelKernel::from_sr(sym.s(), sym.r(), 0.8)?;
    let k12 = kernel_compose(&k1, &k2);
    let fine = crate::model::Axis::symmetric(0.0, 25.0, 5001)?;
    let h = fine.step;
    let f = |x: f64| C64::new((-x * x / 2.0).exp(), 0.0);
    let mid = (0..fine.count)
        .into_par_iter()
        .map(|i| {
            let y = fine.node(i);
            let terms = (0..fine.count)
                .map(|j| Ok(kernel_eval(&k2, y, fine.node(j))? * f(fine.node(j))))
                .collect::<Result<Vec<C64>>>()?;
            Ok(crate::quadrature::pairwise_sum_c(&terms) * h)
        })
        .collect::<Result<Vec<C64>>>()?;
    let out_axis = crate::model::Axis::symmetric(0.0, 4.0, 64)?;
    let gaps = (0..out_axis.count)
        .into_par_iter()
        .map(|i| {
            let e = out_axis.node(i);
            let two = (0..fine.count)
                .map(|j| Ok(kernel_eval(&k1, e, fine.node(j))? * mid[j]))
                .collect::<Result<Vec<C64>>>()?;
            let one = (0..fine.count)
                .map(|j| Ok(kernel_eval(&k12, e, fine.node(j))? * f(fine.node(j))))
                .collect::<Result<Vec<C64>>>()?;
            let two = crate::quadrature::pairwise_sum_c(&two) * h / PI;
            let one = crate::quadrature::pairwise_sum_c(&one) * h;
            Ok((two.norm() - one.norm()).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![ReportEntry::at_most(
        c.entry("modulus"),
        c.anchor,
        gaps.iter().cloned().fold(0.0, f64::max),
        1e-3,
        "max ||two-step| - |composed|| on a 64-point eta1 grid".into(),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse_and_print() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!(suite_checks(Suite::All).len(), CHECKS.len());
        assert_eq!(
            suite_checks(Suite::Kernel),
            vec!["abcd-algebra", "kernel-identity", "kernel-composition"]
        );
    }

    #[test]
    fn entry_rules() {
        assert!(ReportEntry::within("x".into(), "a", 1.04, 1.0, 0.05, String::new()).pass);
        assert!(!ReportEntry::within("x".into(), "a", 0.9, 1.0, 0.05, String::new()).pass);
        assert!(ReportEntry::decreasing("x".into(), "a", &[3.0, 2.0, 1.0]).pass);
        assert!(!ReportEntry::decreasing("x".into(), "a", &[3.0, 3.0, 1.0]).pass);
        let e = ReportEntry::failed("x", "a", &SdwtError::ZeroB);
        assert!(!e.pass && e.computed.is_none());
    }

    #[test]
    fn kernel_suite_passes_on_defaults() {
        let (rep, timings) = run_suite(Suite::Kernel, &RunConfig::default());
        assert!(rep.pass, "{}", rep.to_json());
        assert_eq!(timings.len(), 3);
        let back: VerificationReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn sparse_sampling_fails_parseval() {
        let cfg = RunConfig::default()
            .with_overrides(&["sampling.n_mu=1", "sampling.n_phi=1", "sampling.n_a=2"])
            .unwrap();
        let (rep, _) = run_suite(Suite::Parseval, &cfg);
        assert!(!rep.pass);
        let ratio = rep.entries_for("parseval/pair-0/ratio").next().unwrap();
        assert!(!ratio.pass && ratio.computed.is_some());
    }
}
