//! Quick invariant suites run by `phdae verify`.

use std::fmt;

use super::config::{BoundaryKind, PlateEdge};
use super::scenario::{build_scenario, default_config, run_scenario, MODELS};
use crate::discrete_ops::{sbp_gradient_1d, sbp_operators_2d, Grid1D, SbpPair, StaggeredGrid2D};
use crate::dzektser::{build_dzektser, dissipativity_report, dzektser_initial, DzektserParams};
use crate::error::Result;
use crate::interconnect::couple_spring;
use crate::maxwell2d::{maxwell_diagram_check, maxwell_transposition, EmMaterial};
use crate::numerics::integrate;
use crate::phcore::{check_structure, random_probes, transposition_check, DescriptorPHSystem, TranspositionReport};
use crate::plates::{build_kl_sd, build_kl_sl, build_rm_sd, build_rm_sl, plate_diagram_check, PlateBoundary, PlateDiscretization, PlateMaterial};
use crate::wave1d::{build_wave_sd, build_wave_sl, build_wave_transposition, wave_2d_pair, MassMode, WaveMaterial};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Sbp,
    Structure,
    Equivalence,
    Balance,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "sbp" => Self::Sbp,
            "structure" => Self::Structure,
            "equivalence" => Self::Equivalence,
            "balance" => Self::Balance,
            "all" => Self::All,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<12} {:<48} {:.3e} (tol {:.1e})", self.suite, self.name, self.value, self.tol)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn at_most(&mut self, suite: &'static str, name: impl Into<String>, value: f64, tol: f64) {
        self.checks.push(Check { suite, name: name.into(), value, tol, pass: value <= tol });
    }
}

const SBP_TOL: f64 = 1e-13;
const BALANCE_TOL: f64 = 1e-9;
const MONOTONE_TOL: f64 = 1e-12;

fn worst_identity(pair: &SbpPair, seed: u64) -> f64 {
    let (nv, nu) = pair.forward.shape();
    let us = random_probes(nu, 100, seed);
    let vs = random_probes(nv, 100, seed + 1);
    us.iter().zip(&vs).map(|(u, v)| pair.identity_residual(u, v)).fold(0.0, f64::max)
}

fn sbp(rep: &mut SuiteReport) -> Result<()> {
    let s = "sbp";
    let g1 = Grid1D::new(-0.5, 1.3, 23)?;
    rep.at_most(s, "1D gradient", worst_identity(&sbp_gradient_1d(&g1)?, 11), SBP_TOL);
    let ops = sbp_operators_2d(&StaggeredGrid2D::new(7, 5, 1.4, 0.9)?)?;
    rep.at_most(s, "2D gradient", worst_identity(&ops.grad, 12), SBP_TOL);
    rep.at_most(s, "2D rotated gradient", worst_identity(&ops.gradperp, 13), SBP_TOL);
    rep.at_most(s, "2D symmetric gradient", worst_identity(&ops.symgrad, 14), SBP_TOL);
    rep.at_most(s, "flux divergence of rotated gradient", ops.flux_div.matmul(&ops.gradperp.forward).max_abs(), 0.0);
    Ok(())
}

fn structure(rep: &mut SuiteReport) -> Result<()> {
    for model in MODELS {
        let sc = build_scenario(&default_config(model, 6))?;
        let d = check_structure(&sc.system);
        let defect = d.j_skew_defect.max(d.q_sym_defect).max(d.r_sym_defect).max(d.m_sym_defect);
        let psd = (-d.r_min_rayleigh).max(0.0).max((-d.m_min_rayleigh).max(0.0));
        rep.checks.push(Check {
            suite: "structure",
            name: model.to_string(),
            value: defect.max(psd),
            tol: 0.0,
            pass: d.pass,
        });
    }
    Ok(())
}

fn transposition(rep: &mut SuiteReport, name: &str, t: &TranspositionReport) {
    rep.at_most("equivalence", name, t.max_defect(), crate::phcore::TRANSPOSITION_TOL);
}

fn pair_check(g: &crate::numerics::SparseMatrix, gdag: &crate::numerics::SparseMatrix, sd: &DescriptorPHSystem, sl: &DescriptorPHSystem) -> Result<TranspositionReport> {
    transposition_check(g, gdag, sd, sl, &random_probes(sl.dim(), 10, 21))
}

fn equivalence(rep: &mut SuiteReport) -> Result<()> {
    let g1 = Grid1D::unit(24)?;
    let wave = WaveMaterial::uniform(1.3, 0.7);
    let (g, gdag) = build_wave_transposition(&g1)?;
    let (sd, sl) = (build_wave_sd(&g1, &wave, MassMode::Lumped)?, build_wave_sl(&g1, &wave, MassMode::Lumped)?);
    transposition(rep, "wave1d", &pair_check(&g, &gdag, &sd, &sl)?);

    let grid = StaggeredGrid2D::new(6, 5, 1.0, 0.8)?;
    let (sd, sl, g, gdag) = wave_2d_pair(&grid, &wave)?;
    transposition(rep, "wave2d", &pair_check(&g, &gdag, &sd, &sl)?);

    let pm = PlateMaterial::default();
    for bc in [PlateBoundary::Clamped, PlateBoundary::Free] {
        let (g, gdag) = PlateDiscretization::new(&grid, bc)?.transposition()?;
        let rm = pair_check(&g, &gdag, &build_rm_sd(&grid, &pm, bc)?, &build_rm_sl(&grid, &pm, bc)?)?;
        transposition(rep, &format!("Reissner-Mindlin plate, {bc:?}"), &rm);
        let kl = pair_check(&g, &gdag, &build_kl_sd(&grid, &pm, bc)?, &build_kl_sl(&grid, &pm, bc)?)?;
        transposition(rep, &format!("Kirchhoff-Love plate, {bc:?}"), &kl);
        let d = plate_diagram_check(&grid, &pm, bc)?;
        rep.at_most("equivalence", format!("plate diagram, {bc:?}"), d.constraint_closure.max(d.reduction_defect), 1e-12);
    }

    let em = EmMaterial::conducting(0.5);
    let (g, gdag) = maxwell_transposition(&grid)?;
    let te = pair_check(&g, &gdag, &crate::maxwell2d::build_te_sd(&grid, &em)?, &crate::maxwell2d::build_te_sl(&grid, &em)?)?;
    transposition(rep, "Maxwell TE", &te);
    let d = maxwell_diagram_check(&grid, &em)?;
    rep.at_most("equivalence", "Maxwell low-frequency diagram", if d.pass { d.constraint_closure } else { f64::INFINITY }, 0.0);
    Ok(())
}

fn balance(rep: &mut SuiteReport) -> Result<()> {
    let s = "balance";
    for (model, plate) in [("wave1d_sd", None), ("wave1d_sl", None), ("rm_sl", Some(PlateEdge::Free)), ("maxwell_te_sd", None)] {
        let mut cfg = default_config(model, 8);
        cfg.bc.kind = BoundaryKind::Forced;
        cfg.t_final = 0.05;
        if let Some(p) = plate {
            cfg.bc.plate = p;
        }
        let (_, _, bal) = run_scenario(&cfg)?;
        rep.at_most(s, format!("{model} forced power balance"), bal.max_scaled_residual, BALANCE_TOL);
    }

    let grid = StaggeredGrid2D::unit_square(6)?;
    let dz = build_dzektser(&grid, DzektserParams { mu: 0.01, a: 1.0, b: 0.1 })?;
    let traj = integrate(&dz.system, &dzektser_initial(&grid, &dz), None, 0.05, 1e-3, 1)?;
    let d = dissipativity_report(&traj, &dz)?;
    rep.at_most(s, "dzektser energy increase", d.max_increase.max(-d.min_port_power), MONOTONE_TOL);

    for model in ["maxwell_lf_sd", "maxwell_lf_sl"] {
        let (_, _, bal) = run_scenario(&default_config(model, 6))?;
        rep.at_most(s, format!("{model} energy increase"), bal.max_energy_increase, MONOTONE_TOL);
    }

    let g1 = Grid1D::unit(16)?;
    let a = build_wave_sl(&g1, &WaveMaterial::uniform(1.0, 1.0), MassMode::Lumped)?;
    let c = couple_spring(&a, &a, 2.0, 0.5)?;
    let mut z = crate::wave1d::wave_1d_initial_sl(&g1);
    z.extend(vec![0.0; a.dim()]);
    let traj = integrate(&c.system, &z, None, 0.5, 1e-3, 1)?;
    let bal = crate::phcore::power_balance(&traj, &c.system)?;
    rep.at_most(s, "damped spring coupling energy increase", bal.max_energy_increase, MONOTONE_TOL);
    Ok(())
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let mut rep = SuiteReport::default();
    match suite {
        Suite::Sbp => sbp(&mut rep)?,
        Suite::Structure => structure(&mut rep)?,
        Suite::Equivalence => equivalence(&mut rep)?,
        Suite::Balance => balance(&mut rep)?,
        Suite::All => {
            sbp(&mut rep)?;
            structure(&mut rep)?;
            equivalence(&mut rep)?;
            balance(&mut rep)?;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        let rep = run_suite(Suite::All).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{c}");
        }
        assert!(rep.checks.len() > 20);
    }
}
