//! Numerical verification of the filter bounds.
//!
//! Every uniform bound the three methods are supposed to satisfy is checked
//! on a dense sigma grid for all iterations up to `t_max`:
//!
//! - the residual identity `r_t = 1 - sigma g_t`;
//! - the uniform residual bound `|r_t| <= 1` (`F_0 = 1`);
//! - the filter growth bound `|g_t| <= alpha t` (gradient descent),
//!   `2 alpha t^2` (Nesterov), `2 t^2` (nu-method, kappa <= 1);
//! - gradient descent qualification `sup sigma^q |r_t| <= (q/alpha)^q t^{-q}`
//!   for `q` in `{1/2, 1, 2}`;
//! - Nesterov qualification `sup sigma^{1/2} |r_t| <= (beta^2/alpha)^{1/2}/t`;
//! - the nu-method qualification as a log-log slope:
//!   `sup sigma^nu |r_t|` must decay at least like `t^{-2 nu}`;
//! - the Nesterov auxiliary bounds `|R_t| <= 1` and
//!   `sigma r_t^2 <= (theta_{t-1}^2/alpha)(1 - alpha sigma)^{t+1}`.
//!
//! Suprema are taken over the finite grid; the grid carries the analytic
//! gradient-descent maximizers as extra nodes so they are never straddled.
//! The suite accepts raw hyperparameters without the usual construction
//! checks, so deliberately invalid settings (say a doubled step size) show up
//! as failed bounds rather than as construction errors.

use crate::error::Result;
use crate::filters::{self, FilterMethod, ScalarRecursion, Variant};

/// Settings for one run of the bound suite.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Largest iteration checked.
    pub t_max: usize,
    /// Log-grid resolution before maximizer nodes are added.
    pub grid_points: usize,
    /// Spectral bound shared by all methods in the suite.
    pub kappa_sq: f64,
    /// Gradient descent step; `None` means `1 / kappa_sq`.
    pub gd_alpha: Option<f64>,
    /// Nesterov step; `None` means `0.99 / kappa_sq`.
    pub nesterov_alpha: Option<f64>,
    pub nesterov_beta: f64,
    /// One nu-method instance is checked per entry.
    pub nus: Vec<f64>,
    /// Window `[t_min, t_max]` for the nu-method slope fits.
    pub slope_window: (usize, usize),
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            t_max: 2000,
            grid_points: 512,
            kappa_sq: 1.0,
            gd_alpha: None,
            nesterov_alpha: None,
            nesterov_beta: 1.0,
            nus: vec![1.0, 2.0],
            slope_window: (50, 500),
        }
    }
}

/// Outcome of a single bound check: the worst margin `lhs - rhs` over the
/// grid, where it occurred, and whether it stays within the allowed slack.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub method: String,
    pub name: String,
    pub margin: f64,
    pub slack: f64,
    pub worst_t: usize,
    /// `NaN` when the check has no meaningful sigma location (slope fits).
    pub worst_sigma: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checks: Vec<BoundCheck>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let location = if c.worst_sigma.is_nan() {
                format!("window start t={}", c.worst_t)
            } else {
                format!("t={}, sigma={:.3e}", c.worst_t, c.worst_sigma)
            };
            out.push_str(&format!(
                "[{status}] {:<10} {:<58} worst margin {:>13.6e} (slack {:.1e}) at {location}\n",
                c.method, c.name, c.margin, c.slack
            ));
        }
        let (passed, total) = (self.checks.iter().filter(|c| c.pass).count(), self.checks.len());
        out.push_str(&format!("{passed}/{total} bounds hold\n"));
        out
    }
}

struct Tracker {
    margin: f64,
    t: usize,
    sigma: f64,
}

impl Tracker {
    fn new() -> Self {
        Self { margin: f64::NEG_INFINITY, t: 0, sigma: f64::NAN }
    }

    #[inline]
    fn update(&mut self, value: f64, t: usize, sigma: f64) {
        if value > self.margin {
            self.margin = value;
            self.t = t;
            self.sigma = sigma;
        }
    }

    fn into_check(self, method: &str, name: &str, slack: f64) -> BoundCheck {
        BoundCheck {
            method: method.to_string(),
            name: name.to_string(),
            margin: self.margin,
            slack,
            worst_t: self.t,
            worst_sigma: self.sigma,
            pass: self.margin <= slack,
        }
    }
}

const IDENTITY_SLACK: f64 = 1e-9;
const RESIDUAL_SLACK: f64 = 1e-12;
const POINTWISE_SLACK: f64 = 1e-12;

/// Run the full suite. Faulty hyperparameters are accepted on purpose; they
/// surface as failed checks in the report.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let kappa_sq = cfg.kappa_sq;
    let gd_alpha = cfg.gd_alpha.unwrap_or(1.0 / kappa_sq);
    let nest_alpha = cfg.nesterov_alpha.unwrap_or(0.99 / kappa_sq);
    let grid = filters::verification_grid(gd_alpha, kappa_sq, cfg.t_max, cfg.grid_points)?;
    let mut report = SuiteReport::default();

    check_gradient_descent(cfg, gd_alpha, kappa_sq, &grid, &mut report)?;
    check_nesterov(cfg, nest_alpha, cfg.nesterov_beta, kappa_sq, &grid, &mut report)?;
    for &nu in &cfg.nus {
        check_nu_method(cfg, nu, kappa_sq, &grid, &mut report)?;
    }
    Ok(report)
}

fn check_gradient_descent(
    cfg: &SuiteConfig,
    alpha: f64,
    kappa_sq: f64,
    grid: &[f64],
    report: &mut SuiteReport,
) -> Result<()> {
    let method = FilterMethod::unchecked(Variant::Gd { alpha, kappa_sq });
    let qs = [0.5, 1.0, 2.0];
    // Per-t right-hand sides, hoisted out of the sigma loop.
    let growth: Vec<f64> = (0..=cfg.t_max).map(|t| alpha * t as f64).collect();
    let qual_rhs: Vec<Vec<f64>> = qs
        .iter()
        .map(|&q| {
            (0..=cfg.t_max)
                .map(|t| if t == 0 { f64::INFINITY } else { (q / alpha).powf(q) * (t as f64).powf(-q) })
                .collect()
        })
        .collect();

    let mut ident = Tracker::new();
    let mut residual = Tracker::new();
    let mut growth_tr = Tracker::new();
    let mut qual_tr = [Tracker::new(), Tracker::new(), Tracker::new()];
    for &sigma in grid {
        let powq = qs.map(|q| sigma.powf(q));
        let mut scan = ScalarRecursion::new(&method, sigma);
        for t in 1..=cfg.t_max {
            scan.advance()?;
            let (g, r) = (scan.g(), scan.r());
            ident.update((1.0 - sigma * g - r).abs(), t, sigma);
            residual.update(r.abs() - 1.0, t, sigma);
            growth_tr.update(g.abs() - growth[t], t, sigma);
            for (k, tr) in qual_tr.iter_mut().enumerate() {
                tr.update(powq[k] * r.abs() - qual_rhs[k][t], t, sigma);
            }
        }
    }
    report.checks.push(ident.into_check("gd", "residual identity |1 - sigma g - r|", IDENTITY_SLACK));
    report.checks.push(residual.into_check("gd", "|r_t| <= 1", RESIDUAL_SLACK));
    report.checks.push(growth_tr.into_check("gd", "|g_t| <= alpha t", 0.0));
    for (k, tr) in qual_tr.into_iter().enumerate() {
        let name = format!("sup sigma^q |r_t| <= (q/alpha)^q t^-q, q = {}", qs[k]);
        report.checks.push(tr.into_check("gd", &name, 0.0));
    }
    Ok(())
}

fn check_nesterov(
    cfg: &SuiteConfig,
    alpha: f64,
    beta: f64,
    kappa_sq: f64,
    grid: &[f64],
    report: &mut SuiteReport,
) -> Result<()> {
    let method = FilterMethod::unchecked(Variant::Nesterov { alpha, beta, kappa_sq });
    let growth: Vec<f64> = (0..=cfg.t_max).map(|t| 2.0 * alpha * (t as f64) * (t as f64)).collect();
    let qual_const = (beta * beta / alpha).sqrt();
    let theta: Vec<f64> = (0..=cfg.t_max).map(|t| beta / (t as f64 + beta)).collect();

    let mut ident = Tracker::new();
    let mut residual = Tracker::new();
    let mut growth_tr = Tracker::new();
    let mut qual = Tracker::new();
    let mut aux_bound = Tracker::new();
    let mut pointwise = Tracker::new();
    for &sigma in grid {
        let sqrt_sigma = sigma.sqrt();
        let damp = 1.0 - alpha * sigma;
        let mut scan = ScalarRecursion::new(&method, sigma);
        let mut aux = 1.0;
        let mut damp_pow = damp;
        for t in 1..=cfg.t_max {
            let th = theta[t - 1];
            aux = -(alpha * sigma / th) * (1.0 - th) * scan.r() + damp * aux;
            scan.advance()?;
            damp_pow *= damp;
            let (g, r) = (scan.g(), scan.r());
            ident.update((1.0 - sigma * g - r).abs(), t, sigma);
            residual.update(r.abs() - 1.0, t, sigma);
            growth_tr.update(g.abs() - growth[t], t, sigma);
            qual.update(sqrt_sigma * r.abs() - qual_const / t as f64, t, sigma);
            aux_bound.update(aux.abs() - 1.0, t, sigma);
            pointwise.update(sigma * r * r - th * th / alpha * damp_pow, t, sigma);
        }
    }
    report.checks.push(ident.into_check("nesterov", "residual identity |1 - sigma g - r|", IDENTITY_SLACK));
    report.checks.push(residual.into_check("nesterov", "|r_t| <= 1", RESIDUAL_SLACK));
    report.checks.push(growth_tr.into_check("nesterov", "|g_t| <= 2 alpha t^2", 0.0));
    report
        .checks
        .push(qual.into_check("nesterov", "sup sigma^1/2 |r_t| <= (beta^2/alpha)^1/2 / t", 0.0));
    report.checks.push(aux_bound.into_check("nesterov", "auxiliary |R_t| <= 1", 0.0));
    report.checks.push(pointwise.into_check(
        "nesterov",
        "sigma r_t^2 <= (theta_{t-1}^2/alpha)(1-alpha sigma)^{t+1}",
        POINTWISE_SLACK,
    ));
    Ok(())
}

fn check_nu_method(
    cfg: &SuiteConfig,
    nu: f64,
    kappa_sq: f64,
    grid: &[f64],
    report: &mut SuiteReport,
) -> Result<()> {
    let method = FilterMethod::unchecked(Variant::Nu { nu, kappa_sq });
    let label = format!("nu({nu})");
    let certified = method.bounds_certified();

    let mut ident = Tracker::new();
    let mut residual = Tracker::new();
    let mut growth_tr = Tracker::new();
    let mut sup_weighted = vec![0.0_f64; cfg.t_max];
    for &sigma in grid {
        let pow_nu = sigma.powf(nu);
        let mut scan = ScalarRecursion::new(&method, sigma);
        for t in 1..=cfg.t_max {
            scan.advance()?;
            let (g, r) = (scan.g(), scan.r());
            ident.update((1.0 - sigma * g - r).abs(), t, sigma);
            residual.update(r.abs() - 1.0, t, sigma);
            growth_tr.update(g.abs() - 2.0 * (t as f64) * (t as f64), t, sigma);
            let w = pow_nu * r.abs();
            if w > sup_weighted[t - 1] {
                sup_weighted[t - 1] = w;
            }
        }
    }
    report.checks.push(ident.into_check(&label, "residual identity |1 - sigma g - r|", IDENTITY_SLACK));
    if certified {
        report.checks.push(residual.into_check(&label, "|r_t| <= 1", RESIDUAL_SLACK));
        report.checks.push(growth_tr.into_check(&label, "|g_t| <= 2 t^2", 0.0));
    }

    let (w_lo, w_hi) = cfg.slope_window;
    let slope = filters::qualification_slope(&sup_weighted, w_lo, w_hi.min(cfg.t_max))?;
    let limit = -2.0 * nu + 0.1;
    let check = BoundCheck {
        method: label,
        name: format!("log-log slope of sup sigma^nu |r_t| <= {limit} on [{w_lo}, {w_hi}]"),
        margin: slope - limit,
        slack: 0.0,
        worst_t: w_lo,
        worst_sigma: f64::NAN,
        pass: slope - limit <= 0.0,
    };
    report.checks.push(check);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> SuiteConfig {
        SuiteConfig {
            t_max: 260,
            grid_points: 160,
            slope_window: (40, 220),
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn default_parameters_pass_reduced_suite() {
        let report = run_suite(&quick_config()).unwrap();
        assert!(report.all_pass(), "{}", report.render());
        // One line per check, plus the summary.
        assert!(report.render().contains("sigma r_t^2"));
    }

    #[test]
    fn doubled_gd_step_fails() {
        let cfg = SuiteConfig { gd_alpha: Some(2.0), ..quick_config() };
        let report = run_suite(&cfg).unwrap();
        assert!(!report.all_pass());
        let gd_fail = report.checks.iter().any(|c| c.method == "gd" && !c.pass);
        assert!(gd_fail, "{}", report.render());
    }

    #[test]
    fn report_locates_worst_margin() {
        let report = run_suite(&quick_config()).unwrap();
        let ident = report
            .checks
            .iter()
            .find(|c| c.method == "gd" && c.name.contains("identity"))
            .unwrap();
        assert!(ident.worst_t >= 1);
        assert!(ident.worst_sigma > 0.0);
    }
}
