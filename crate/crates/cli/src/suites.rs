//! Check suites driving the core library.

use clap::ValueEnum;
use workbench_core::bethe::{self, BetheOptions, BetheReport};
use workbench_core::boundary::{dual_reflection_residual, reflection_residual};
use workbench_core::gauge::GaugedChain;
use workbench_core::linalg::cr;
use workbench_core::rmatrix::{projector_spin_l, r_s_s_fusion_ratio, ybe_residual};
use workbench_core::sampling::Sampler;
use workbench_core::sov::Sov;
use workbench_core::spectrum::track_eigenvalues;
use workbench_core::tq::TqFunctions;
use workbench_core::{c64, CMatrix, Chain, ModelParams, SpinLabel, WorkbenchError};

use crate::config::RunConfig;
use crate::report::{pair, BetheRecord, CheckRecord, Report, SpectrumRecord};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ybe,
    Reflection,
    Fusion,
    Transfer,
    Gauge,
    Sov,
    Scalar,
    Tq,
    Bethe,
    All,
}

impl Suite {
    pub const ORDERED: [Suite; 9] = [
        Suite::Ybe,
        Suite::Reflection,
        Suite::Fusion,
        Suite::Transfer,
        Suite::Gauge,
        Suite::Sov,
        Suite::Scalar,
        Suite::Tq,
        Suite::Bethe,
    ];

    fn salt(self) -> u64 {
        Self::ORDERED.iter().position(|&s| s == self).unwrap_or(0) as u64 + 1
    }

    /// Suites that need the gauge, hence `ς = 0` and `ξ ≠ 0`.
    fn needs_gauge(self) -> bool {
        matches!(self, Suite::Gauge | Suite::Sov | Suite::Scalar)
    }
}

/// Default tolerances.
pub mod tol {
    pub const ALGEBRA: f64 = 1e-10;
    pub const TRANSFER: f64 = 1e-8;
    pub const TRANSFER_DEEP: f64 = 1e-7;
    pub const RELATIONS: f64 = 1e-9;
    pub const STATES: f64 = 1e-11;
    pub const SOV_EIGEN: f64 = 1e-8;
    pub const SOV_CONDITION: f64 = 1e12;
    pub const PAIRING: f64 = 1e-7;
    pub const OVERLAP: f64 = 1e-7;
    pub const RECURSION: f64 = 1e-8;
    pub const TQ_FIT: f64 = 1e-7;
    pub const BAE_RAW: f64 = 1e-5;
    pub const BAE: f64 = 1e-10;
    pub const TRACE: f64 = 1e-8;
    pub const FIDELITY: f64 = 1e-7;
    pub const EIGENSTATE: f64 = 1e-6;
    pub const HAMILTONIAN: f64 = 1e-8;
    pub const ASYMPTOTIC: f64 = 1e-6;
}

/// Shared state for one run: configuration, the tolerance override and a
/// lazily computed Bethe pipeline.
pub struct Runner<'a> {
    cfg: &'a RunConfig,
    chain: Chain,
    bethe: Option<BetheReport>,
    notes: Vec<String>,
}

fn core(e: WorkbenchError) -> CliError {
    CliError::Core(e)
}

impl<'a> Runner<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        Ok(Self {
            cfg,
            chain: Chain::new(cfg.params.clone()).map_err(core)?,
            bethe: None,
            notes: Vec::new(),
        })
    }

    /// Messages about skipped checks, meant for stderr.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    fn params(&self) -> &ModelParams {
        &self.cfg.params
    }

    fn tol(&self, default: f64) -> f64 {
        self.cfg.tol.unwrap_or(default)
    }

    fn sampler(&self, suite: Suite) -> Sampler {
        Sampler::new(self.cfg.seed.wrapping_mul(1_000_003).wrapping_add(suite.salt()))
    }

    fn check(&self, name: impl Into<String>, anchor: &str, residual: f64, default_tol: f64) -> CheckRecord {
        CheckRecord::new(name, anchor, residual, self.tol(default_tol))
    }

    fn check_result(
        &self,
        name: impl Into<String>,
        anchor: &str,
        residual: workbench_core::Result<f64>,
        default_tol: f64,
    ) -> CheckRecord {
        match residual {
            Ok(r) => self.check(name, anchor, r, default_tol),
            Err(_) => CheckRecord::failed(name, anchor, self.tol(default_tol)),
        }
    }

    fn gauge_available(&self) -> bool {
        let b = &self.params().boundary;
        b.varsigma == c64::new(0.0, 0.0) && b.xi.norm() > 1e-12
    }

    fn spins(&self) -> Vec<SpinLabel> {
        let s = self.params().spin;
        if s == SpinLabel::HALF {
            vec![s]
        } else {
            vec![SpinLabel::HALF, s]
        }
    }

    pub fn run(&mut self, suite: Suite, report: &mut Report) -> Result<(), CliError> {
        let list: Vec<Suite> = if suite == Suite::All { Suite::ORDERED.to_vec() } else { vec![suite] };
        for s in list {
            if s.needs_gauge() && !self.gauge_available() {
                if suite == Suite::All {
                    self.notes.push(format!("{s:?} suite skipped: requires varsigma = 0 and xi != 0"));
                    continue;
                }
                return Err(CliError::Usage(format!("{s:?} suite requires varsigma = 0 and xi != 0")));
            }
            if matches!(s, Suite::Sov | Suite::Scalar) && self.cfg.homogeneous {
                if suite == Suite::All {
                    self.notes.push(format!("{s:?} suite skipped: needs generic inhomogeneities"));
                    continue;
                }
                return Err(CliError::Usage(format!("{s:?} suite needs generic inhomogeneities")));
            }
            let rows = match s {
                Suite::Ybe => self.ybe()?,
                Suite::Reflection => self.reflection()?,
                Suite::Fusion => self.fusion()?,
                Suite::Transfer => self.transfer()?,
                Suite::Gauge => self.gauge()?,
                Suite::Sov => self.sov()?,
                Suite::Scalar => self.scalar()?,
                Suite::Tq => self.tq()?,
                Suite::Bethe => self.bethe_checks()?,
                Suite::All => unreachable!(),
            };
            report.checks.extend(rows);
        }
        if self.bethe.is_some() && report.bethe.is_empty() {
            report.bethe = self.bethe_records();
        }
        Ok(())
    }

    fn ybe(&self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Ybe);
        let eta = self.params().eta;
        let pairs: Vec<_> = (0..2).map(|_| smp.generic_pair(eta, 0.1)).collect();
        let spins = self.spins();
        let mut out = Vec::new();
        for &a in &spins {
            for &b in &spins {
                for &c in &spins {
                    let r = pairs
                        .iter()
                        .map(|&(u, v)| ybe_residual(a, b, c, u, v, eta))
                        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
                    out.push(self.check_result(format!("ybe/({a},{b},{c})"), "yang-baxter", r, tol::ALGEBRA));
                }
            }
        }
        Ok(out)
    }

    fn reflection(&self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Reflection);
        let p = self.params();
        let pairs: Vec<_> = (0..2).map(|_| smp.generic_pair(p.eta, 0.1)).collect();
        let spins = self.spins();
        let mut out = Vec::new();
        for &j in &spins {
            for &s in &spins {
                let b = &p.boundary;
                let re = pairs
                    .iter()
                    .map(|&(u, v)| reflection_residual(j, s, u, v, b.p, b.varsigma, p.eta))
                    .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
                out.push(self.check_result(format!("reflection/K-({j},{s})"), "reflection-equation", re, tol::ALGEBRA));
                let dual = pairs
                    .iter()
                    .map(|&(u, v)| dual_reflection_residual(j, s, u, v, b, p.eta))
                    .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
                out.push(self.check_result(format!("reflection/K+({j},{s})"), "dual-reflection-equation", dual, tol::ALGEBRA));
            }
        }
        let chain = &self.chain;
        let (u, v) = pairs[0];
        out.push(self.check_result("reflection/double-row", "double-row-reflection", chain.double_row_reflection_residual(u, v), tol::RELATIONS));
        out.push(self.check_result("reflection/rtt", "rtt-relation", chain.rtt_residual(u, v), tol::RELATIONS));
        Ok(out)
    }

    fn fusion(&self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Fusion);
        let p = self.params();
        let s = p.spin;
        let mut out = Vec::new();
        let mut defect: f64 = 0.0;
        let mut norm: f64 = 0.0;
        let mut failed = false;
        for _ in 0..2 {
            let u = smp.annulus(0.3, 1.2, p.eta.norm());
            match r_s_s_fusion_ratio(u, s, p.eta) {
                Ok((ratio, d)) => {
                    defect = defect.max(d);
                    norm = norm.max((ratio - 1.0).norm());
                }
                Err(_) => failed = true,
            }
        }
        let (defect, norm) = if failed { (f64::NAN, f64::NAN) } else { (defect, norm) };
        out.push(self.check(format!("fusion/R({s},{s}) proportional to fused"), "fusion", defect, tol::ALGEBRA));
        out.push(self.check(format!("fusion/R({s},{s}) normalization"), "fusion", norm, tol::ALGEBRA));
        let d = s.dim();
        let completeness = (0..=s.twice())
            .map(|l| projector_spin_l(l, s))
            .try_fold(CMatrix::zeros(d * d, d * d), |acc, pr| pr.map(|pr| &acc + &pr))
            .map(|sum| (&sum - &CMatrix::identity(d * d)).norm() / (d as f64));
        out.push(self.check_result("fusion/projector completeness", "fusion", completeness, tol::ALGEBRA));
        Ok(out)
    }

    fn transfer(&mut self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Transfer);
        let p = self.params().clone();
        let chain = &self.chain;
        let t = if p.spin.twice() >= 3 { tol::TRANSFER_DEEP } else { tol::TRANSFER };
        let scale = p.eta.norm();
        let pairs: Vec<_> = (0..3).map(|_| smp.generic_pair(p.eta, 0.1)).collect();
        let max_over = |f: &dyn Fn(c64, c64) -> workbench_core::Result<f64>| {
            pairs.iter().map(|&(u, v)| f(u, v)).try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
        };
        let mut out = vec![
            self.check_result("transfer/commutativity", "transfer-commutativity", max_over(&|u, v| chain.commutativity_residual(u, v)), t),
            self.check_result(
                format!("transfer/commutativity (1/2,{})", p.spin),
                "transfer-commutativity",
                max_over(&|u, v| chain.mixed_commutativity_residual(SpinLabel::HALF, u, p.spin, v)),
                t,
            ),
            self.check_result("transfer/crossing", "crossing-symmetry", max_over(&|u, _| chain.crossing_residual(u)), t),
            self.check_result("transfer/value at zero", "initial-value", chain.zero_value_residual(), t),
            self.check_result("transfer/asymptotic coefficient", "asymptotics", chain.asymptotic_residual(), t),
            self.check_result("transfer/polynomiality", "asymptotics", max_over(&|u, _| chain.polynomiality_residual(u)), t),
            self.check_result("transfer/hat pattern", "monodromy-hat", max_over(&|u, _| chain.hat_pattern_residual(u)), t),
        ];
        for twice_j in 2..=p.spin.twice().max(2) {
            let r = max_over(&|u, _| chain.hierarchy_residual(twice_j, u));
            let label = SpinLabel::from_twice(twice_j).map_err(core)?;
            out.push(self.check_result(format!("transfer/hierarchy j={label}"), "fusion-hierarchy", r, t));
        }
        let mut skipped = Vec::new();
        for l in 1..=p.sites() {
            match chain.closure_residual(l) {
                Err(WorkbenchError::Pole { what, at }) => skipped.push(format!("closure l={l} skipped: pole in {what} at u = {at}")),
                r => out.push(self.check_result(format!("transfer/closure l={l}"), "closure", r, t)),
            }
        }
        self.notes.extend(skipped);
        let chain = &self.chain;
        match chain.hamiltonian() {
            Ok(h) => {
                let us: Vec<c64> = (0..3).map(|_| smp.annulus(0.3, 1.2, scale)).collect();
                let r = us
                    .iter()
                    .map(|&u| chain.hamiltonian_commutator_residual(&h, u))
                    .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
                out.push(self.check_result("transfer/hamiltonian commutes", "hamiltonian", r, tol::HAMILTONIAN));
            }
            Err(WorkbenchError::SingularConfiguration(msg)) => {
                self.notes.push(format!("hamiltonian check skipped: {msg}"));
            }
            Err(_) => out.push(CheckRecord::failed("transfer/hamiltonian commutes", "hamiltonian", self.tol(tol::HAMILTONIAN))),
        }
        Ok(out)
    }

    fn gauge(&self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Gauge);
        let g = GaugedChain::new(self.params().clone()).map_err(core)?;
        let eta = self.params().eta;
        let pairs: Vec<_> = (0..10).map(|_| smp.generic_pair(eta, 0.1)).collect();
        let mut out = Vec::new();

        let merge = |rows: &mut Vec<(String, f64)>, new: Vec<(&'static str, f64)>| {
            for (name, r) in new {
                match rows.iter_mut().find(|(n, _)| n == name) {
                    Some(slot) => slot.1 = slot.1.max(r),
                    None => rows.push((name.to_string(), r)),
                }
            }
        };
        let mut one = Vec::new();
        let mut double = Vec::new();
        let mut det = Vec::new();
        let mut states = Vec::new();
        let mut recon: f64 = 0.0;
        let mut expansion: f64 = 0.0;
        for &(u, v) in &pairs {
            merge(&mut one, g.one_row_relations(u, v).map_err(core)?);
            merge(&mut double, g.double_row_relations(u, v).map_err(core)?);
            merge(&mut det, g.one_row_determinant_relations(u).map_err(core)?);
            merge(&mut states, g.product_state_relations(u).map_err(core)?);
            merge(&mut states, g.vacuum_relations(u).map_err(core)?);
            merge(&mut states, g.omega_action_relations(u).map_err(core)?);
            recon = recon.max(g.reconstruction_residual(u).map_err(core)?);
            expansion = expansion.max(g.gauge_expansion_residual(u).map_err(core)?);
        }
        for (name, r) in one {
            out.push(self.check(format!("gauge/one-row {name}"), "one-row-algebra", r, tol::RELATIONS));
        }
        for (name, r) in double {
            out.push(self.check(format!("gauge/double-row {name}"), "double-row-algebra", r, tol::RELATIONS));
        }
        for (name, r) in det {
            out.push(self.check(format!("gauge/{name}"), "quantum-determinant", r, tol::RELATIONS));
        }
        for (name, r) in states {
            out.push(self.check(format!("gauge/{name}"), "reference-states", r, tol::STATES));
        }
        out.push(self.check("gauge/transfer reconstruction", "gauged-transfer", recon, tol::STATES));
        out.push(self.check("gauge/block expansion", "gauged-transfer", expansion, tol::STATES));

        let mut qdet: f64 = 0.0;
        for &(u, _) in &pairs {
            qdet = qdet.max(g.double_row_determinant_residual(u).map_err(core)?);
        }
        out.push(self.check("gauge/double-row quantum determinant", "quantum-determinant", qdet, tol::RELATIONS));

        let refs = g.reference_states().map_err(core)?;
        out.push(self.check("gauge/reference gram", "reference-states", refs.gram_defect(), tol::STATES));
        out.push(self.check("gauge/reference annihilation", "reference-states", refs.annihilation_defect(), tol::STATES));
        Ok(out)
    }

    fn sov(&self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Sov);
        let sov = Sov::new(self.params().clone()).map_err(core)?;
        let eta = self.params().eta;
        let us: Vec<c64> = (0..4).map(|_| smp.annulus(0.3, 1.2, eta.norm())).collect();
        let tw = self.params().spin.twice();
        let mut right: f64 = 0.0;
        let mut left: f64 = 0.0;
        let mut action: f64 = 0.0;
        let mut overlap: f64 = 0.0;
        let mut vac_rel: f64 = 0.0;
        for idx in sov.indices() {
            for &u in &us {
                let (r, l) = sov.c_eigen_residuals(u, &idx).map_err(core)?;
                right = right.max(r);
                left = left.max(l);
            }
            let direct = sov.vac_ratio(&idx).map_err(core)?;
            let formula = sov.vac_ratio_formula(&idx).map_err(core)?;
            overlap = overlap.max((direct - formula).norm() / formula.norm().max(direct.norm()));
            for n in 0..idx.sites() {
                for m in 1..=tw {
                    action = action.max(sov.dbar_action_residual(&idx, n, m).map_err(core)?);
                    vac_rel = vac_rel
                        .max(sov.vac_annihilation_residual(&idx, n, m).map_err(core)?)
                        .max(sov.vac_c_relation_residual(&idx, n, m).map_err(core)?);
                }
            }
        }
        let pairing = sov.pairing().map_err(core)?;
        Ok(vec![
            self.check("sov/right C-eigenvalues", "sov-basis", right, tol::SOV_EIGEN),
            self.check("sov/left C-eigenvalues", "sov-basis", left, tol::SOV_EIGEN),
            self.check("sov/right basis condition number", "sov-basis", sov.right_condition().map_err(core)?, tol::SOV_CONDITION),
            self.check("sov/reflected pairing leakage", "sov-basis", pairing.reflected_leakage, tol::PAIRING),
            self.check("sov/D-bar annihilates reference", "d-bar", sov.dbar_omega_residual().map_err(core)?, tol::ALGEBRA),
            self.check("sov/D-bar lowering action", "d-bar", action, tol::RELATIONS),
            self.check("sov/vacuum overlap formula", "vacuum-overlap", overlap, tol::OVERLAP),
            self.check("sov/vacuum relations", "vacuum-overlap", vac_rel, tol::RELATIONS),
        ])
    }

    fn ensure_bethe(&mut self) -> Result<&BetheReport, CliError> {
        if self.bethe.is_none() {
            let opts = BetheOptions {
                samples: self.cfg.samples,
                seed: self.cfg.seed,
                ..BetheOptions::default()
            };
            self.bethe = Some(bethe::solve(&self.cfg.params, &opts).map_err(core)?);
        }
        Ok(self.bethe.as_ref().expect("just computed"))
    }

    fn scalar(&mut self) -> Result<Vec<CheckRecord>, CliError> {
        let sov = Sov::new(self.params().clone()).map_err(core)?;
        let tw = self.params().spin.twice();
        let report = self.ensure_bethe()?.clone();
        let chain = Chain::new(self.params().clone()).map_err(core)?;
        let vac_omega = sov.states().vac.dot(&sov.states().omega);
        let mut out = Vec::new();
        for (track, sol) in report.spectrum.tracks.iter().zip(&report.solutions) {
            let i = track.index;
            let psi = &track.left;
            let lam = |u: c64| psi.dot(&chain.transfer_half(u).expect("validated parameters").mul_vec(&track.right));
            let mut rec: f64 = 0.0;
            for idx in sov.indices() {
                for n in 0..idx.sites() {
                    let a = idx.alpha()[n];
                    if a == 0 {
                        rec = rec.max(sov.initial_condition_residual(psi, lam, &idx, n).map_err(core)?);
                    } else if a < tw {
                        rec = rec.max(sov.recursion_residual(psi, lam, &idx, n, a).map_err(core)?);
                    }
                }
            }
            out.push(self.check(format!("scalar/[{i}] recursion"), "scalar-product", rec, tol::RECURSION));
            let Ok(sol) = sol else {
                out.push(CheckRecord::failed(format!("scalar/[{i}] closed form"), "scalar-product", self.tol(tol::OVERLAP)));
                continue;
            };
            let f0 = sov.scalar_product(psi, &workbench_core::sov::SovIndex::zero(self.params().sites())).map_err(core)?;
            let mut closed: f64 = 0.0;
            let mut bethe_pair: f64 = 0.0;
            for idx in sov.indices() {
                let want = sov.closed_form_ratio(&idx, |u| sol.q.eval(u)).map_err(core)?;
                let got = sov.scalar_product(psi, &idx).map_err(core)? / f0;
                closed = closed.max((got - want).norm() / want.norm().max(got.norm()));
                if let Some(st) = &sol.states {
                    let direct = sov.scalar_product(&st.left, &idx).map_err(core)?;
                    let formula = want * vac_omega;
                    bethe_pair = bethe_pair.max((direct - formula).norm() / formula.norm().max(direct.norm()));
                }
            }
            out.push(self.check(format!("scalar/[{i}] closed form"), "scalar-product", closed, tol::OVERLAP));
            out.push(self.check(format!("scalar/[{i}] left Bethe state pairing"), "scalar-product", bethe_pair, tol::OVERLAP));
        }
        Ok(out)
    }

    fn tq(&mut self) -> Result<Vec<CheckRecord>, CliError> {
        let mut smp = self.sampler(Suite::Tq);
        let p = self.params().clone();
        let tqf = TqFunctions::new(&p);
        let b = &p.boundary;
        let r1 = (b.xi * b.xi + 1.0).sqrt();
        let r2 = (b.varsigma * b.varsigma + 1.0).sqrt();
        let c_want = (b.varsigma * b.xi - 1.0 - r1 * r2) * 2.0;
        let mut crossing: f64 = 0.0;
        for _ in 0..3 {
            let u = smp.annulus(0.3, 1.2, p.eta.norm());
            let (d, a) = (tqf.d(u), tqf.a(-u - p.eta));
            crossing = crossing.max((d - a).norm() / d.norm().max(a.norm()));
        }
        let mut out = vec![
            self.check("tq/constant c", "tq-relation", (tqf.c() - c_want).norm() / c_want.norm(), tol::ALGEBRA),
            self.check("tq/crossing of a and d", "tq-relation", crossing, tol::ALGEBRA),
        ];
        let asym_want = self.chain.asymptotic_coefficient();
        let zero_want = tqf.value_at_zero();
        let degree = 2 * p.sites() + 2;
        let report = self.ensure_bethe()?.clone();
        out.push(self.check("tq/trace of eigenvalues", "tq-relation", report.spectrum.trace_residual, tol::TRACE));
        for (track, sol) in report.spectrum.tracks.iter().zip(&report.solutions) {
            let i = track.index;
            let sol = match sol {
                Ok(s) => s,
                Err(e) => {
                    self.notes.push(format!("eigenstate {i}: {e}"));
                    out.push(CheckRecord::failed(format!("tq/[{i}] fit"), "tq-relation", self.tol(tol::TQ_FIT)));
                    continue;
                }
            };
            out.push(self.check(format!("tq/[{i}] fit"), "tq-relation", sol.tq_residual, tol::TQ_FIT));
            out.push(self.check(format!("tq/[{i}] held-out eigenvalues"), "tq-relation", sol.held_out_residual, tol::TQ_FIT));
            let raw = sol.raw_bae_residuals.iter().cloned().fold(0.0, f64::max);
            out.push(self.check(format!("tq/[{i}] extracted roots satisfy BAE"), "bethe-equations", raw, tol::BAE_RAW));
            let zero = tqf.lambda(cr(0.0), &sol.q).map(|l| (l - zero_want).norm() / zero_want.norm());
            out.push(self.check_result(format!("tq/[{i}] value at zero"), "tq-relation", zero, tol::TRANSFER));
            let lead = leading_coefficient(|u| tqf.lambda(u, &sol.q), degree, 1.5 * p.eta.norm())
                .map(|c| (c - asym_want).norm() / asym_want.norm());
            out.push(self.check_result(format!("tq/[{i}] asymptotic coefficient"), "asymptotics", lead, tol::ASYMPTOTIC));
        }
        Ok(out)
    }

    fn bethe_checks(&mut self) -> Result<Vec<CheckRecord>, CliError> {
        let m = TqFunctions::new(self.params()).degree();
        let report = self.ensure_bethe()?.clone();
        let gauge = self.gauge_available();
        let mut out = Vec::new();
        for (track, sol) in report.spectrum.tracks.iter().zip(&report.solutions) {
            let i = track.index;
            let sol = match sol {
                Ok(s) => s,
                Err(e) => {
                    self.notes.push(format!("eigenstate {i}: {e}"));
                    out.push(CheckRecord::failed(format!("bethe/[{i}] BAE"), "bethe-equations", self.tol(tol::BAE)));
                    continue;
                }
            };
            let count = if sol.roots.len() == m { 0.0 } else { 1.0 };
            out.push(CheckRecord::new(format!("bethe/[{i}] root count {m}"), "bethe-equations", count, 0.5));
            out.push(self.check(format!("bethe/[{i}] BAE"), "bethe-equations", sol.max_bae(), tol::BAE));
            if let Some(st) = &sol.states {
                out.push(self.check(format!("bethe/[{i}] infidelity"), "bethe-states", 1.0 - st.fidelity(), tol::FIDELITY));
                out.push(self.check(format!("bethe/[{i}] eigenstate residual"), "bethe-states", st.residual(), tol::EIGENSTATE));
            }
        }
        if gauge {
            let g = GaugedChain::new(self.params().clone()).map_err(core)?;
            if let Some(Ok(sol)) = report.solutions.first() {
                let (r, l) = bethe::order_invariance_residual(&g, &sol.roots).map_err(core)?;
                out.push(self.check("bethe/order invariance", "bethe-states", r.max(l), tol::ALGEBRA));
            }
            if !self.cfg.homogeneous {
                out.extend(self.homogeneous_checks()?);
            }
        }
        Ok(out)
    }

    /// Bethe states rebuilt with all θ = 0.
    fn homogeneous_checks(&self) -> Result<Vec<CheckRecord>, CliError> {
        let opts = BetheOptions {
            samples: self.cfg.samples,
            seed: self.cfg.seed,
            ..BetheOptions::default()
        };
        let rep = bethe::solve(&self.params().homogeneous(), &opts).map_err(core)?;
        Ok(rep
            .solutions
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let r = match s {
                    Ok(sol) => sol.states.as_ref().map_or(f64::NAN, |st| st.residual()),
                    Err(_) => f64::NAN,
                };
                self.check(format!("bethe/[{i}] homogeneous eigenstate residual"), "homogeneous-limit", r, tol::EIGENSTATE)
            })
            .collect())
    }

    pub fn bethe_records(&self) -> Vec<BetheRecord> {
        let Some(report) = &self.bethe else {
            return Vec::new();
        };
        report
            .spectrum
            .tracks
            .iter()
            .zip(&report.solutions)
            .map(|(track, sol)| match sol {
                Ok(s) => BetheRecord {
                    eigen_index: track.index,
                    eigenvalue: pair(track.value),
                    roots: s.roots.iter().map(|&l| pair(l)).collect(),
                    bae_residuals: s.bae_residuals.iter().map(|&r| crate::report::Num(r)).collect(),
                    tq_residual: crate::report::Num(s.tq_residual),
                    held_out_residual: crate::report::Num(s.held_out_residual),
                    fidelity: crate::report::Num(s.states.as_ref().map_or(f64::NAN, |st| st.fidelity())),
                    eigen_residual: crate::report::Num(s.states.as_ref().map_or(f64::NAN, |st| st.residual())),
                    normalized: s.states.as_ref().is_some_and(|st| st.normalized),
                    error: None,
                },
                Err(e) => BetheRecord {
                    eigen_index: track.index,
                    eigenvalue: pair(track.value),
                    roots: Vec::new(),
                    bae_residuals: Vec::new(),
                    tq_residual: crate::report::Num(f64::NAN),
                    held_out_residual: crate::report::Num(f64::NAN),
                    fidelity: crate::report::Num(f64::NAN),
                    eigen_residual: crate::report::Num(f64::NAN),
                    normalized: false,
                    error: Some(e.to_string()),
                },
            })
            .collect()
    }

    /// Runs the Bethe pipeline and the checks tied to it.
    pub fn run_bethe(&mut self, report: &mut Report) -> Result<(), CliError> {
        let mut rows = self.tq()?;
        rows.extend(self.bethe_checks()?);
        report.checks.extend(rows);
        report.bethe = self.bethe_records();
        Ok(())
    }

    /// Eigenvalues of `t(u*)` and the tracking diagnostics.
    pub fn run_spectrum(&mut self, report: &mut Report) -> Result<(), CliError> {
        let mut smp = self.sampler(Suite::Tq);
        let scale = self.params().eta.norm();
        let pts: Vec<c64> = (0..8).map(|_| smp.annulus(0.5, 1.5, scale)).collect();
        let sp = track_eigenvalues(&self.chain, &pts, &mut smp).map_err(core)?;
        report.checks.push(self.check("spectrum/trace of eigenvalues", "transfer-commutativity", sp.trace_residual, tol::TRACE));
        let worst = sp.tracks.iter().map(|t| t.max_residual).fold(0.0, f64::max);
        report.checks.push(self.check("spectrum/common eigenvectors", "transfer-commutativity", worst, tol::TRANSFER));
        report.spectrum = sp
            .tracks
            .iter()
            .map(|t| SpectrumRecord {
                eigen_index: t.index,
                reference: pair(sp.reference),
                eigenvalue: pair(t.value),
                residual: crate::report::Num(t.max_residual),
            })
            .collect();
        Ok(())
    }
}

/// Coefficient of `u^degree` of a polynomial of that degree, from its values
/// on a circle.
fn leading_coefficient(f: impl Fn(c64) -> workbench_core::Result<c64>, degree: usize, radius: f64) -> workbench_core::Result<c64> {
    let n = degree + 1;
    let mut acc = c64::new(0.0, 0.0);
    for k in 0..n {
        let w = c64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64 + 0.1);
        let u = w * radius;
        acc += f(u)? / w.powu(degree as u32);
    }
    Ok(acc / (n as f64 * radius.powi(degree as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficient_of_cubic() {
        let f = |u: c64| Ok(u * u * u * 2.5 - u * 0.3 + 1.0);
        let c = leading_coefficient(f, 3, 1.7).unwrap();
        assert!((c - 2.5).norm() < 1e-12);
    }
}
