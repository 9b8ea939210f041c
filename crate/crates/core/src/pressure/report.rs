//! Per-`n` tables of every pressure quantity plus the inequality audit.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cover::{Cover, Partition};
use crate::energy::EnergyFunctional;
use crate::rational::to_f64;
use crate::subshift::{Dyadic, Subshift};
use crate::{Rational, Result};

use super::{
    extremal_sums, greedy_bn, greedy_disjointify, CoverPressure, PressureOptions, PressureValue,
    Radius,
};

/// What to compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportConfig {
    pub n_values: Vec<usize>,
    /// Radii `2^-m` for the reported `P_n` and `Q_n` columns.
    pub m_list: Vec<u32>,
    /// Trailing window for the limsup/liminf estimates; half the rows when
    /// `None`.
    pub window: Option<usize>,
    /// Run the greedy constructions and their certificates.
    pub greedy: bool,
}

impl ReportConfig {
    pub fn new(n_values: Vec<usize>, m_list: Vec<u32>) -> Self {
        ReportConfig {
            n_values,
            m_list,
            window: None,
            greedy: true,
        }
    }
}

/// `P_n` and `Q_n` at one radius `2^-m`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonRow {
    pub m: u32,
    pub separated: PressureValue,
    pub spanning: PressureValue,
}

/// One checked inequality `lhs ≤ rhs` (logs), or a certificate with
/// `lhs`/`rhs` the two compared quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct Audit {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Audit {
    fn le(name: &str, lhs: f64, rhs: f64) -> Audit {
        let tol = 1e-9 * lhs.abs().max(rhs.abs()).max(1.0);
        Audit {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureRow {
    pub n: usize,
    pub p1: PressureValue,
    pub p2: PressureValue,
    pub p3: PressureValue,
    pub p4: PressureValue,
    /// `N(U_0^{n-1})`.
    pub subcover_count: usize,
    pub eps: Vec<EpsilonRow>,
    pub audits: Vec<Audit>,
}

impl PressureRow {
    pub fn audits_pass(&self) -> bool {
        self.audits.iter().all(|a| a.holds)
    }
}

/// Trailing-window max and min of a rate column.
#[derive(Clone, Debug, PartialEq)]
pub struct RateEstimate {
    pub column: String,
    pub limsup: f64,
    pub liminf: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PressureReport {
    pub rows: Vec<PressureRow>,
    pub diam: Dyadic,
    pub lebesgue_exp: u32,
    /// `τ̂_ε` at `ε = diam(U)`.
    pub tau_diam: Rational,
    /// Radius `ε > diam(U)` used for the separated/spanning sandwich.
    pub sandwich_radius: Radius,
    /// `τ̂_ε` at that radius.
    pub tau_sandwich: Rational,
    pub window: usize,
    pub estimates: Vec<RateEstimate>,
}

impl PressureReport {
    pub fn audits_pass(&self) -> bool {
        self.rows.iter().all(PressureRow::audits_pass)
    }
}

/// Geometry of the cover shared by all rows.
#[derive(Clone, Debug, PartialEq)]
struct Geometry {
    diam: Dyadic,
    lebesgue_exp: u32,
    tau_diam: Rational,
    sandwich_radius: Radius,
    tau_sandwich: Rational,
}

fn geometry(sys: &Subshift, cover: &Cover, energy: &EnergyFunctional) -> Geometry {
    let diam = cover.diam(sys);
    let lebesgue_exp = cover.lebesgue_exponent(sys);
    // strictly above diam(U): twice the diameter, or anything above 1 when
    // diam(U) = 1; a cover by singletons can use any positive radius
    let (sandwich_radius, eps) = match diam {
        Dyadic::Pow(0) => (Radius::Whole, crate::rational::int(2)),
        Dyadic::Pow(k) => (Radius::Pow(k - 1), Dyadic::Pow(k - 1).to_rational()),
        Dyadic::Zero => (
            Radius::Pow(lebesgue_exp),
            Dyadic::Pow(lebesgue_exp).to_rational(),
        ),
    };
    Geometry {
        diam,
        lebesgue_exp,
        tau_diam: energy.modulus_bound_dyadic(diam),
        sandwich_radius,
        tau_sandwich: energy.modulus_bound(&eps),
    }
}

/// Every quantity for one `n`, with the audit.
pub fn pressure_row(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    config: &ReportConfig,
    opts: &PressureOptions,
) -> Result<PressureRow> {
    let geo = geometry(sys, cover, energy);
    row_with(sys, cover, energy, n, config, opts, &geo)
}

fn row_with(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    n: usize,
    config: &ReportConfig,
    opts: &PressureOptions,
    geo: &Geometry,
) -> Result<PressureRow> {
    let compiled = energy.compile(sys)?;
    let cp = CoverPressure::new(sys, cover, &compiled, n, opts)?;
    let sol1 = cp.p1()?;
    let p1 = sol1.value;
    let p2 = cp.p2()?.value;
    let p3 = cp.p3()?.value;
    let p4 = cp.p4()?.value;
    let subcover_count = cp.subcover_count()?;

    let mut eps = Vec::with_capacity(config.m_list.len());
    for &m in &config.m_list {
        let s = extremal_sums(sys, &compiled, n, Radius::Pow(m), opts)?;
        eps.push(EpsilonRow {
            m,
            separated: s.separated,
            spanning: s.spanning,
        });
    }

    let nf = n as f64;
    let t_diam = nf * to_f64(&geo.tau_diam);
    let t_sand = nf * to_f64(&geo.tau_sandwich);
    let half_delta = extremal_sums(sys, &compiled, n, Radius::Pow(geo.lebesgue_exp + 1), opts)?;
    let sandwich = extremal_sums(sys, &compiled, n, geo.sandwich_radius, opts)?;

    let mut audits = alloc::vec![
        Audit::le("p2<=p4", p2.log, p4.log),
        Audit::le("p4<=p3", p4.log, p3.log),
        Audit::le("p2<=p1", p2.log, p1.log),
        Audit::le("p1<=p3", p1.log, p3.log),
        Audit::le(
            "p3-n*tau<=Q(delta/2)",
            p3.log - t_diam,
            half_delta.spanning.log
        ),
        Audit::le(
            "Q(eps)<=P(eps)",
            sandwich.spanning.log,
            sandwich.separated.log
        ),
        Audit::le("P(eps)<=p2+n*tau", sandwich.separated.log, p2.log + t_sand),
        Audit::le("p1<=p2+n*tau", p1.log, p2.log + t_diam),
        Audit::le("p3<=p4+n*tau", p3.log, p4.log + t_diam),
        Audit::le("p4<=Q(delta/2)", p4.log, half_delta.spanning.log),
    ];

    if config.greedy {
        let parts: Vec<Partition> = cover.enumerate_assignments(sys).take(n).collect();
        let bn = greedy_bn(sys, &compiled, n, &parts, opts)?;
        audits.push(Audit {
            name: "greedy B_n >= p1/(2n)".into(),
            lhs: p1.log - libm::log(2.0 * nf),
            rhs: bn.sum.log,
            holds: bn.certifies(&p1, n),
        });
        let d = greedy_disjointify(sys, cover, &compiled, n, geo.lebesgue_exp, opts)?;
        audits.push(Audit {
            name: "disjointified classes = separated points".into(),
            lhs: d.certificate.class_sum.log(),
            rhs: d.certificate.point_sum.log(),
            holds: d.certificate.passes(),
        });
        audits.push(Audit::le(
            "p1<=P(delta/2)",
            p1.log,
            half_delta.separated.log,
        ));
    }

    Ok(PressureRow {
        n,
        p1,
        p2,
        p3,
        p4,
        subcover_count,
        eps,
        audits,
    })
}

/// Assembles rows computed elsewhere (possibly in parallel) into a report.
pub fn assemble(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    rows: Vec<PressureRow>,
    window: Option<usize>,
) -> PressureReport {
    let geo = geometry(sys, cover, energy);
    let window = window.unwrap_or(rows.len() / 2).clamp(1, rows.len().max(1));
    let tail = &rows[rows.len().saturating_sub(window)..];
    let mut estimates = Vec::new();
    let mut column = |name: String, rate: &dyn Fn(&PressureRow) -> f64| {
        let rates: Vec<f64> = tail.iter().map(rate).collect();
        if !rates.is_empty() {
            estimates.push(RateEstimate {
                column: name,
                limsup: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                liminf: rates.iter().copied().fold(f64::INFINITY, f64::min),
            });
        }
    };
    column("p1".into(), &|r| r.p1.rate(r.n));
    column("p2".into(), &|r| r.p2.rate(r.n));
    column("p3".into(), &|r| r.p3.rate(r.n));
    column("p4".into(), &|r| r.p4.rate(r.n));
    if let Some(first) = rows.first() {
        for (j, e) in first.eps.iter().enumerate() {
            column(alloc::format!("P(m={})", e.m), &|r| {
                r.eps[j].separated.rate(r.n)
            });
            column(alloc::format!("Q(m={})", e.m), &|r| {
                r.eps[j].spanning.rate(r.n)
            });
        }
    }
    PressureReport {
        rows,
        diam: geo.diam,
        lebesgue_exp: geo.lebesgue_exp,
        tau_diam: geo.tau_diam,
        sandwich_radius: geo.sandwich_radius,
        tau_sandwich: geo.tau_sandwich,
        window,
        estimates,
    }
}

/// All rows for `config.n_values`, sequentially.
pub fn pressure_report(
    sys: &Subshift,
    cover: &Cover,
    energy: &EnergyFunctional,
    config: &ReportConfig,
    opts: &PressureOptions,
) -> Result<PressureReport> {
    let geo = geometry(sys, cover, energy);
    let rows = config
        .n_values
        .iter()
        .map(|&n| row_with(sys, cover, energy, n, config, opts, &geo))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(sys, cover, energy, rows, config.window))
}
