use serde::Serialize;

use divconv::arith::{sigma, sigma_table, FactorSieve};
use divconv::asymptotic::{
    dirichlet_identity_check, error_exponent_fit, expand, geometric_grid, hurwitz_sigma_identity_check,
    restricted_power_sum_check, ApproxConfig,
};
use divconv::convolution::{s_ab_batch, verify_identity_s11k, verify_identity_s33};
use divconv::kloosterman::{decomposition_sweep, twisted_bound_sweep, weil_sweep};
use divconv::sts::density_experiment;
use divconv::Result;

use crate::output::{f17, Int, Num, Report, Value};

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

// sigma / convolve

#[derive(Serialize)]
pub struct Entry {
    n: u64,
    value: Value,
}

#[derive(Serialize)]
pub struct Table {
    #[serde(skip)]
    column: &'static str,
    a: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<Num>,
    values: Vec<Entry>,
}

impl Report for Table {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", self.column]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.values.iter().map(|e| vec![e.n.to_string(), e.value.cell()]).collect()
    }
}

pub fn sigma_cmd(a: f64, limit: u64, only: Option<u64>) -> Result<Table> {
    let values = match only {
        Some(n) => {
            let sieve = FactorSieve::new(n.max(2))?;
            vec![Entry {
                n,
                value: Value::from(&sigma(a, n, &sieve)?),
            }]
        }
        None if limit == 0 => Vec::new(),
        None => {
            let t = sigma_table(a, limit)?;
            (1..=limit)
                .map(|n| {
                    Ok(Entry {
                        n,
                        value: Value::from(&t.get(n)?),
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Table {
        column: "sigma",
        a: Num(a),
        b: None,
        values,
    })
}

pub fn convolve_cmd(a: f64, b: f64, limit: u64, only: Option<u64>) -> Result<Table> {
    let top = only.unwrap_or(limit);
    let batch = if top == 0 { Vec::new() } else { s_ab_batch(a, b, top)? };
    let values = batch
        .into_iter()
        .filter(|r| only.map_or(true, |n| r.n == n))
        .map(|r| Entry {
            n: r.n,
            value: Value::from(&r.value),
        })
        .collect();
    Ok(Table {
        column: "s_ab",
        a: Num(a),
        b: Some(Num(b)),
        values,
    })
}

// verify

#[derive(Serialize)]
pub struct ResidualRow {
    n: u64,
    residual: Int,
}

#[derive(Serialize)]
pub struct Verification {
    check: String,
    sign: Option<&'static str>,
    n_checked: u64,
    residuals: usize,
    status: &'static str,
    failures: Vec<ResidualRow>,
}

impl Report for Verification {
    fn header(&self) -> Vec<&'static str> {
        vec!["check", "sign", "n_checked", "residuals", "status", "n", "residual"]
    }
    /// A summary row, then one FAIL row per nonzero residual.
    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec![
            self.check.clone(),
            self.sign.unwrap_or_default().into(),
            self.n_checked.to_string(),
            self.residuals.to_string(),
            self.status.into(),
            String::new(),
            String::new(),
        ]];
        rows.extend(self.failures.iter().map(|f| {
            vec![
                self.check.clone(),
                self.sign.unwrap_or_default().into(),
                String::new(),
                String::new(),
                "FAIL".into(),
                f.n.to_string(),
                f.residual.0.clone(),
            ]
        }));
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Identity {
    S33,
    S11k2,
    S11k4,
}

pub fn verify_cmd(identity: Identity, limit: u64) -> Result<Verification> {
    let r = match identity {
        Identity::S33 => verify_identity_s33(limit)?,
        Identity::S11k2 => verify_identity_s11k(2, limit)?,
        Identity::S11k4 => verify_identity_s11k(4, limit)?,
    };
    let sign = match r.sign {
        Some(s) if s < 0 => Some("minus"),
        Some(_) => Some("plus"),
        None => None,
    };
    Ok(Verification {
        status: pass(r.passed()),
        check: r.check.clone(),
        sign,
        n_checked: r.n_checked,
        residuals: r.failures.len(),
        failures: r
            .failures
            .iter()
            .map(|(n, v)| ResidualRow {
                n: *n,
                residual: Int::of(v),
            })
            .collect(),
    })
}

// kloosterman

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KloostermanCheck {
    Decomposition,
    Weil,
    Bound,
}

#[derive(Serialize)]
pub struct KloostermanReport {
    check: &'static str,
    limit: u64,
    param_max: i64,
    cases: u64,
    /// Largest gap, Weil ratio, or normalized twisted sum.
    max_value: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_gap: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    at_d: Option<u64>,
    violations: u64,
    status: &'static str,
}

impl Report for KloostermanReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["check", "limit", "param_max", "cases", "max_value", "at_d", "violations", "status"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.check.into(),
            self.limit.to_string(),
            self.param_max.to_string(),
            self.cases.to_string(),
            f17(self.max_value.0),
            self.at_d.map(|d| d.to_string()).unwrap_or_default(),
            self.violations.to_string(),
            self.status.into(),
        ]]
    }
}

/// Gap allowed between the two twisted-sum evaluations.
pub const DECOMPOSITION_TOL: f64 = 1e-6;

pub fn kloosterman_cmd(check: KloostermanCheck, limit: u64, param_max: i64) -> KloostermanReport {
    match check {
        KloostermanCheck::Decomposition => {
            let s = decomposition_sweep(limit, param_max, DECOMPOSITION_TOL);
            KloostermanReport {
                check: "decomposition",
                limit,
                param_max,
                cases: s.cases,
                max_value: Num(s.max_value),
                max_gap: Some(Num(s.max_value)),
                at_d: None,
                violations: s.violations,
                status: pass(s.violations == 0),
            }
        }
        KloostermanCheck::Weil => {
            let s = weil_sweep(limit, param_max);
            KloostermanReport {
                check: "weil",
                limit,
                param_max,
                cases: s.cases,
                max_value: Num(s.max_value),
                max_gap: None,
                at_d: None,
                violations: s.violations,
                status: pass(s.violations == 0),
            }
        }
        KloostermanCheck::Bound => {
            let (sup, d) = twisted_bound_sweep(limit, param_max);
            let p = param_max.max(0) as u64;
            KloostermanReport {
                check: "bound",
                limit,
                param_max,
                cases: limit * p * p * p,
                max_value: Num(sup),
                max_gap: None,
                at_d: Some(d),
                violations: 0,
                status: pass(sup.is_finite()),
            }
        }
    }
}

// expand

#[derive(Serialize)]
pub struct ResidueOut {
    m: u32,
    value: Num,
}

#[derive(Serialize)]
pub struct ExpansionOut {
    a: Num,
    b: Num,
    n: u64,
    regime: &'static str,
    main: Num,
    secondary: Num,
    residues: Vec<ResidueOut>,
    approx: Num,
    predicted_error_exponent: Num,
}

impl Report for ExpansionOut {
    fn header(&self) -> Vec<&'static str> {
        vec!["a", "b", "n", "regime", "main", "secondary", "residues", "approx", "predicted_error_exponent"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        let residues = self
            .residues
            .iter()
            .map(|r| format!("{}:{}", r.m, f17(r.value.0)))
            .collect::<Vec<_>>()
            .join(";");
        vec![vec![
            f17(self.a.0),
            f17(self.b.0),
            self.n.to_string(),
            self.regime.into(),
            f17(self.main.0),
            f17(self.secondary.0),
            residues,
            f17(self.approx.0),
            f17(self.predicted_error_exponent.0),
        ]]
    }
}

pub fn expand_cmd(a: f64, b: f64, n: u64, cfg: &ApproxConfig) -> Result<ExpansionOut> {
    let e = expand(a, b, n, cfg)?;
    Ok(ExpansionOut {
        a: Num(e.exponents.a()),
        b: Num(e.exponents.b()),
        n,
        regime: e.regime().as_str(),
        main: Num(e.main),
        secondary: Num(e.secondary),
        residues: e.residues.iter().map(|&(m, v)| ResidueOut { m, value: Num(v) }).collect(),
        approx: Num(e.approx),
        predicted_error_exponent: Num(e.predicted_error_exponent),
    })
}

// error-scan

#[derive(Serialize)]
pub struct ScanPoint {
    n: u64,
    s_exact: Num,
    approx: Num,
    residual: Num,
    log_n: Num,
    log_abs_residual: Num,
}

#[derive(Serialize)]
pub struct ErrorScan {
    a: Num,
    b: Num,
    slope: Num,
    intercept: Num,
    predicted: Num,
    points: Vec<ScanPoint>,
}

impl Report for ErrorScan {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", "s_exact", "approx", "residual", "log_n", "log_abs_residual"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    f17(p.s_exact.0),
                    f17(p.approx.0),
                    f17(p.residual.0),
                    f17(p.log_n.0),
                    f17(p.log_abs_residual.0),
                ]
            })
            .collect()
    }
    fn footer(&self) -> Option<Vec<String>> {
        Some(vec![
            "slope".into(),
            f17(self.slope.0),
            "predicted".into(),
            f17(self.predicted.0),
        ])
    }
}

pub fn error_scan_cmd(a: f64, b: f64, grid: (u64, u64, usize), cfg: &ApproxConfig) -> Result<ErrorScan> {
    let ns = geometric_grid(grid.0, grid.1, grid.2);
    let r = error_exponent_fit(a, b, &ns, cfg)?;
    Ok(ErrorScan {
        a: Num(a),
        b: Num(b),
        slope: Num(r.slope),
        intercept: Num(r.intercept),
        predicted: Num(r.predicted),
        points: r
            .points
            .iter()
            .map(|p| ScanPoint {
                n: p.n,
                s_exact: Num(p.s_exact),
                approx: Num(p.approx),
                residual: Num(p.residual),
                log_n: Num((p.n as f64).ln()),
                log_abs_residual: Num(p.residual.abs().ln()),
            })
            .collect(),
    })
}

// lemmas

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LemmaCheck {
    PowerSum,
    Dirichlet,
    HurwitzSigma,
    All,
}

#[derive(Serialize)]
pub struct LemmaRow {
    lemma: &'static str,
    params: String,
    value: Num,
    reference: Num,
    /// Normalized deviation for power sums, absolute gap otherwise.
    gap: Num,
    bound: Num,
    status: &'static str,
}

#[derive(Serialize)]
pub struct LemmaReport {
    rows: Vec<LemmaRow>,
}

impl Report for LemmaReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["lemma", "params", "value", "reference", "gap", "bound", "status"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.lemma.into(),
                    r.params.clone(),
                    f17(r.value.0),
                    f17(r.reference.0),
                    f17(r.gap.0),
                    f17(r.bound.0),
                    r.status.into(),
                ]
            })
            .collect()
    }
}

/// Single constant bounding the normalized power-sum deviation.
pub const POWER_SUM_CONSTANT: f64 = 2.0;
/// Allowed ratio of a truncation gap to its modeled tail.
pub const TAIL_FACTOR: f64 = 5.0;

/// `(a, b, m, k)` tuples for the restricted power sum.
pub const POWER_SUM_TUPLES: [(f64, f64, u64, u64); 3] = [(1.0, 1.0, 1, 1), (1.5, 2.5, 3, 2), (0.5, 3.25, 5, 4)];
/// `(r, s, T)` for the coprime double sum.
pub const DIRICHLET_SETS: [(f64, f64, u64); 3] = [(2.0, 2.0, 2000), (3.0, 4.0, 500), (2.5, 2.0, 1000)];
/// `(a, b, n, d_max)` for the Hurwitz-sigma identity.
pub const HURWITZ_SETS: [(f64, f64, u64, u64); 3] = [(1.0, 2.0, 6, 2000), (-0.5, 2.0, 6, 2000), (1.0, 2.0, 1, 500)];

pub fn lemmas_cmd(which: LemmaCheck) -> Result<LemmaReport> {
    let mut rows = Vec::new();
    if matches!(which, LemmaCheck::PowerSum | LemmaCheck::All) {
        for (a, b, m, k) in POWER_SUM_TUPLES {
            for n in [100u64, 1000, 10_000] {
                let c = restricted_power_sum_check(n, m, k, a, b)?;
                rows.push(LemmaRow {
                    lemma: "power-sum",
                    params: format!("a={a} b={b} m={m} k={k} n={n}"),
                    value: Num(c.exact),
                    reference: Num(c.main),
                    gap: Num(c.deviation),
                    bound: Num(POWER_SUM_CONSTANT),
                    status: pass(c.deviation <= POWER_SUM_CONSTANT),
                });
            }
        }
    }
    if matches!(which, LemmaCheck::Dirichlet | LemmaCheck::All) {
        for (r, s, t) in DIRICHLET_SETS {
            let c = dirichlet_identity_check(r, s, t)?;
            rows.push(LemmaRow {
                lemma: "dirichlet",
                params: format!("r={r} s={s} T={t}"),
                value: Num(c.lhs),
                reference: Num(c.rhs),
                gap: Num(c.gap),
                bound: Num(TAIL_FACTOR * c.model),
                status: pass(c.gap <= TAIL_FACTOR * c.model),
            });
        }
    }
    if matches!(which, LemmaCheck::HurwitzSigma | LemmaCheck::All) {
        for (a, b, n, d_max) in HURWITZ_SETS {
            let c = hurwitz_sigma_identity_check(a, b, n, d_max)?;
            rows.push(LemmaRow {
                lemma: "hurwitz-sigma",
                params: format!("a={a} b={b} n={n} d_max={d_max}"),
                value: Num(c.lhs),
                reference: Num(c.rhs),
                gap: Num(c.gap),
                bound: Num(TAIL_FACTOR * c.model),
                status: pass(c.gap <= TAIL_FACTOR * c.model),
            });
        }
    }
    Ok(LemmaReport { rows })
}

// sts-density

#[derive(Serialize)]
pub struct DensityRow {
    n: u64,
    d_value: Int,
    poly_part: Int,
    ratio: Num,
    cesaro: Num,
}

#[derive(Serialize)]
pub struct DensityReport {
    pub target: Num,
    pub final_cesaro: Num,
    points: Vec<DensityRow>,
}

impl Report for DensityReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["n", "d_value", "poly_part", "ratio", "cesaro"]
    }
    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    p.d_value.0.clone(),
                    p.poly_part.0.clone(),
                    f17(p.ratio.0),
                    f17(p.cesaro.0),
                ]
            })
            .collect()
    }
}

pub fn sts_density_cmd(limit: u64) -> Result<DensityReport> {
    let e = density_experiment(limit)?;
    Ok(DensityReport {
        target: Num(e.target),
        final_cesaro: Num(e.final_cesaro()),
        points: e
            .points
            .iter()
            .map(|p| DensityRow {
                n: p.count.n,
                d_value: Int::of(&p.count.d_value),
                // Always an integer: n(n−1)J_2(n) is divisible by 6.
                poly_part: Int::of(p.count.polynomial_part.to_integer()),
                ratio: Num(p.ratio),
                cesaro: Num(p.cesaro),
            })
            .collect(),
    })
}
