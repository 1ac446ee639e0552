//! Translates a [`Scenario`] into an [`LpProblem`].
//!
//! Columns per technology `s`: capacity `C[s]`, hourly generation `G[s][t]`
//! and, for renewables, curtailment `CU[s][t]`. Per storage `r`: capacities
//! `C_in[r]`, `C_out[r]`, `C_l[r]` and hourly `G_in`, `G_out`, `G_l`.
//!
//! Rows: hourly balance (`= d_t`, dual λ_t), renewable availability
//! (`ḡ C − G − CU = 0`), conventional capacity (`G − C <= 0`), storage
//! capacities, storage level continuity, and at most one policy block.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::{LpProblem, LpSolver, RowId, Sense, Solution, Status, VarId};
use crate::model::{validate_scenario, PolicyKind, PolicySpec, Scenario, Slcr, Variant};

#[derive(Debug, Clone, PartialEq)]
pub struct TechCols {
    pub name: String,
    pub renewable: bool,
    pub capacity: VarId,
    pub generation: Vec<VarId>,
    /// Empty for conventional technologies.
    pub curtailment: Vec<VarId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageCols {
    pub name: String,
    pub cap_in: VarId,
    pub cap_out: VarId,
    pub cap_level: VarId,
    pub charge: Vec<VarId>,
    pub discharge: Vec<VarId>,
    pub level: Vec<VarId>,
    pub level_rows: Vec<RowId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarLayout {
    pub horizon: usize,
    pub techs: Vec<TechCols>,
    pub storages: Vec<StorageCols>,
    pub balance_rows: Vec<RowId>,
    /// The renewable-share, potential-share or carbon-cap row.
    pub policy_row: Option<RowId>,
    pub target_rows: Vec<(String, RowId)>,
}

impl VarLayout {
    pub fn n_columns(&self) -> usize {
        let t: usize = self
            .techs
            .iter()
            .map(|c| 1 + c.generation.len() + c.curtailment.len())
            .sum();
        t + self.storages.len() * (3 + 3 * self.horizon)
    }

    pub fn tech(&self, name: &str) -> Option<&TechCols> {
        self.techs.iter().find(|t| t.name == name)
    }
}

/// A single constraint before it is appended: `coeffs · x <sense> rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRow {
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl PolicyRow {
    /// Coefficients merged per column and sorted, exact zeros dropped.
    pub fn normalized(&self) -> Vec<(VarId, f64)> {
        let mut m: BTreeMap<VarId, f64> = BTreeMap::new();
        for &(v, a) in &self.coeffs {
            *m.entry(v).or_default() += a;
        }
        m.into_iter().filter(|&(_, a)| a != 0.0).collect()
    }
}

fn push_generation(out: &mut Vec<(VarId, f64)>, layout: &VarLayout, renewable: bool, coef: f64) {
    for tech in layout.techs.iter().filter(|t| t.renewable == renewable) {
        out.extend(tech.generation.iter().map(|&v| (v, coef)));
    }
}

/// Adds `coef · Σ_r,t (G_in − G_out)`.
fn push_losses(out: &mut Vec<(VarId, f64)>, layout: &VarLayout, coef: f64) {
    for st in &layout.storages {
        out.extend(st.charge.iter().map(|&v| (v, coef)));
        out.extend(st.discharge.iter().map(|&v| (v, -coef)));
    }
}

/// The renewable-share row of `variant` with all variables on the left.
///
/// With `R`, `C` the renewable and conventional generation totals, `L` the
/// storage losses `Σ(G_in − G_out)` and `D` total demand:
///
/// | | zero (a) | proportionate (b) | complete (c) |
/// |---|---|---|---|
/// | 1 | `R >= φD` | `R − φL >= φD` | `R − L >= φD` |
/// | 2 | `R − φ(R+C) + φL >= 0` | `R − φ(R+C) >= 0` | `R − φ(R+C) − (1−φ)L >= 0` |
/// | 3 | `C − L <= (1−φ)D` | `C − (1−φ)L <= (1−φ)D` | `C <= (1−φ)D` |
/// | 4 | `C − (1−φ)(R+C) − φL <= 0` | `C − (1−φ)(R+C) <= 0` | `C − (1−φ)(R+C) + (1−φ)L <= 0` |
pub fn policy_row(variant: Variant, phi: f64, total_demand: f64, layout: &VarLayout) -> Result<PolicyRow> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!("phi must be in [0, 1], got {phi}")));
    }
    let mut c = Vec::new();
    let (sense, rhs, loss_coef) = match variant.family {
        1 => {
            push_generation(&mut c, layout, true, 1.0);
            let l = match variant.slcr {
                Slcr::Zero => 0.0,
                Slcr::Proportionate => -phi,
                Slcr::Complete => -1.0,
            };
            (Sense::Ge, phi * total_demand, l)
        }
        2 => {
            push_generation(&mut c, layout, true, 1.0 - phi);
            push_generation(&mut c, layout, false, -phi);
            let l = match variant.slcr {
                Slcr::Zero => phi,
                Slcr::Proportionate => 0.0,
                Slcr::Complete => -(1.0 - phi),
            };
            (Sense::Ge, 0.0, l)
        }
        3 => {
            push_generation(&mut c, layout, false, 1.0);
            let l = match variant.slcr {
                Slcr::Zero => -1.0,
                Slcr::Proportionate => -(1.0 - phi),
                Slcr::Complete => 0.0,
            };
            (Sense::Le, (1.0 - phi) * total_demand, l)
        }
        4 => {
            push_generation(&mut c, layout, false, phi);
            push_generation(&mut c, layout, true, -(1.0 - phi));
            let l = match variant.slcr {
                Slcr::Zero => -phi,
                Slcr::Proportionate => 0.0,
                Slcr::Complete => 1.0 - phi,
            };
            (Sense::Le, 0.0, l)
        }
        f => return Err(Error::InvalidParameter(format!("constraint family must be 1..4, got {f}"))),
    };
    if loss_coef != 0.0 {
        push_losses(&mut c, layout, loss_coef);
    }
    Ok(PolicyRow { coeffs: c, sense, rhs })
}

/// Coefficient of `G_in` in the policy row of `variant` (and minus that of
/// `G_out`).
pub fn loss_coefficient(variant: Variant, phi: f64) -> f64 {
    match (variant.family, variant.slcr) {
        (1, Slcr::Zero) | (2, Slcr::Proportionate) | (3, Slcr::Complete) | (4, Slcr::Proportionate) => 0.0,
        (1, Slcr::Proportionate) => -phi,
        (1, Slcr::Complete) | (3, Slcr::Zero) => -1.0,
        (2, Slcr::Zero) => phi,
        (2, Slcr::Complete) | (3, Slcr::Proportionate) => -(1.0 - phi),
        (4, Slcr::Zero) => -phi,
        (4, Slcr::Complete) => 1.0 - phi,
        _ => 0.0,
    }
}

/// Minimum share of demand covered by renewable potential before
/// curtailment: `Σ_s (Σ_t ḡ_st) C_s >= φ Σ_t d_t`.
pub fn potential_share_row(phi: f64, s: &Scenario, layout: &VarLayout) -> Result<PolicyRow> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!("phi must be in [0, 1], got {phi}")));
    }
    let coeffs = s
        .technologies
        .iter()
        .zip(&layout.techs)
        .filter(|(t, _)| t.is_renewable())
        .map(|(t, cols)| (cols.capacity, t.availability.iter().sum::<f64>()))
        .collect();
    Ok(PolicyRow {
        coeffs,
        sense: Sense::Ge,
        rhs: phi * s.total_demand(),
    })
}

/// `C_s >= target_s` for every listed renewable technology.
pub fn capacity_target_rows(
    targets: &BTreeMap<String, f64>,
    layout: &VarLayout,
) -> Result<Vec<(String, PolicyRow)>> {
    targets
        .iter()
        .map(|(name, &target)| {
            let tech = layout
                .tech(name)
                .ok_or_else(|| Error::UnknownTechnology(name.clone()))?;
            if !tech.renewable {
                return Err(Error::InvalidParameter(format!(
                    "capacity target on conventional technology `{name}`"
                )));
            }
            Ok((
                name.clone(),
                PolicyRow {
                    coeffs: vec![(tech.capacity, 1.0)],
                    sense: Sense::Ge,
                    rhs: target,
                },
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum CarbonTerm {
    /// `Σ e_s G_st <= cap`.
    Row(PolicyRow),
    /// Added to the variable cost of the listed generation columns.
    CostDelta(Vec<(VarId, f64)>),
    Omitted,
}

/// Carbon cap row or carbon price cost adders for `policy`.
pub fn carbon_rows_or_cost(policy: &PolicySpec, s: &Scenario, layout: &VarLayout) -> CarbonTerm {
    let weighted = |w: f64| -> Vec<(VarId, f64)> {
        s.technologies
            .iter()
            .zip(&layout.techs)
            .filter(|(t, _)| t.emission_factor != 0.0)
            .flat_map(|(t, cols)| cols.generation.iter().map(move |&v| (v, w * t.emission_factor)))
            .collect()
    };
    match policy.kind {
        PolicyKind::CarbonCap if policy.cap.is_finite() => CarbonTerm::Row(PolicyRow {
            coeffs: weighted(1.0),
            sense: Sense::Le,
            rhs: policy.cap,
        }),
        PolicyKind::CarbonPrice if policy.price != 0.0 => CarbonTerm::CostDelta(weighted(policy.price)),
        _ => CarbonTerm::Omitted,
    }
}

/// Builds the LP for `s`. Fails if the scenario has violations.
pub fn build_lp(s: &Scenario) -> Result<(LpProblem, VarLayout)> {
    let violations = validate_scenario(s);
    if !violations.is_empty() {
        return Err(Error::InvalidScenario(violations));
    }
    let t_max = s.horizon;
    let mut lp = LpProblem::new();

    let mut techs = Vec::with_capacity(s.technologies.len());
    for tech in &s.technologies {
        let n = &tech.name;
        let capacity = lp.add_var(format!("C[{n}]"), tech.capacity_cost);
        let generation = (0..t_max)
            .map(|t| lp.add_var(format!("G[{n}][t={t}]"), tech.variable_cost))
            .collect();
        let curtailment = if tech.is_renewable() {
            (0..t_max)
                .map(|t| lp.add_var(format!("CU[{n}][t={t}]"), tech.curtailment_cost))
                .collect()
        } else {
            Vec::new()
        };
        techs.push(TechCols {
            name: n.clone(),
            renewable: tech.is_renewable(),
            capacity,
            generation,
            curtailment,
        });
    }
    let mut storages = Vec::with_capacity(s.storages.len());
    for st in &s.storages {
        let n = &st.name;
        let cap_in = lp.add_var(format!("C_in[{n}]"), st.charge_cost);
        let cap_out = lp.add_var(format!("C_out[{n}]"), st.discharge_cost);
        let cap_level = lp.add_var(format!("C_l[{n}]"), st.energy_cost);
        let charge = (0..t_max)
            .map(|t| lp.add_var(format!("G_in[{n}][t={t}]"), st.var_charge_cost))
            .collect();
        let discharge = (0..t_max)
            .map(|t| lp.add_var(format!("G_out[{n}][t={t}]"), st.var_discharge_cost))
            .collect();
        let level = (0..t_max)
            .map(|t| lp.add_var(format!("G_l[{n}][t={t}]"), 0.0))
            .collect();
        storages.push(StorageCols {
            name: n.clone(),
            cap_in,
            cap_out,
            cap_level,
            charge,
            discharge,
            level,
            level_rows: Vec::new(),
        });
    }

    let balance_rows = (0..t_max)
        .map(|t| {
            let mut c: Vec<(VarId, f64)> = techs.iter().map(|tc| (tc.generation[t], 1.0)).collect();
            for sc in &storages {
                c.push((sc.discharge[t], 1.0));
                c.push((sc.charge[t], -1.0));
            }
            lp.add_row(format!("balance[t={t}]"), c, Sense::Eq, s.demand[t])
        })
        .collect();

    for (tech, tc) in s.technologies.iter().zip(&techs) {
        let n = &tech.name;
        for t in 0..t_max {
            if tech.is_renewable() {
                lp.add_row(
                    format!("avail[{n}][t={t}]"),
                    [
                        (tc.capacity, tech.availability[t]),
                        (tc.generation[t], -1.0),
                        (tc.curtailment[t], -1.0),
                    ],
                    Sense::Eq,
                    0.0,
                );
            } else {
                lp.add_row(
                    format!("cap[{n}][t={t}]"),
                    [(tc.generation[t], 1.0), (tc.capacity, -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }

    for (st, sc) in s.storages.iter().zip(storages.iter_mut()) {
        let n = &st.name;
        for t in 0..t_max {
            lp.add_row(format!("cap_in[{n}][t={t}]"), [(sc.charge[t], 1.0), (sc.cap_in, -1.0)], Sense::Le, 0.0);
            lp.add_row(format!("cap_out[{n}][t={t}]"), [(sc.discharge[t], 1.0), (sc.cap_out, -1.0)], Sense::Le, 0.0);
            lp.add_row(format!("cap_l[{n}][t={t}]"), [(sc.level[t], 1.0), (sc.cap_level, -1.0)], Sense::Le, 0.0);
        }
        for t in 0..t_max {
            let mut c = vec![
                (sc.level[t], 1.0),
                (sc.charge[t], -st.eta_in),
                (sc.discharge[t], 1.0 / st.eta_out),
            ];
            let prev = if t > 0 {
                Some(t - 1)
            } else if s.wrap_storage_level {
                Some(t_max - 1)
            } else {
                None
            };
            if let Some(p) = prev {
                c.push((sc.level[p], -st.self_discharge));
            }
            let row = lp.add_row(format!("level[{n}][t={t}]"), c, Sense::Eq, 0.0);
            sc.level_rows.push(row);
        }
    }

    let mut layout = VarLayout {
        horizon: t_max,
        techs,
        storages,
        balance_rows,
        policy_row: None,
        target_rows: Vec::new(),
    };

    let p = &s.policy;
    match p.kind {
        PolicyKind::RenewableShare => {
            let variant = Variant::new(p.family, p.slcr)?;
            let row = policy_row(variant, p.phi, s.total_demand(), &layout)?;
            layout.policy_row = Some(lp.add_row("policy", row.coeffs, row.sense, row.rhs));
        }
        PolicyKind::PotentialShare => {
            let row = potential_share_row(p.phi, s, &layout)?;
            layout.policy_row = Some(lp.add_row("policy", row.coeffs, row.sense, row.rhs));
        }
        PolicyKind::CapacityTarget => {
            for (name, row) in capacity_target_rows(&p.capacity_targets, &layout)? {
                let id = lp.add_row(format!("target[{name}]"), row.coeffs, row.sense, row.rhs);
                layout.target_rows.push((name, id));
            }
        }
        PolicyKind::CarbonCap | PolicyKind::CarbonPrice => match carbon_rows_or_cost(p, s, &layout) {
            CarbonTerm::Row(row) => {
                layout.policy_row = Some(lp.add_row("policy", row.coeffs, row.sense, row.rhs));
            }
            CarbonTerm::CostDelta(delta) => {
                for (v, dc) in delta {
                    let c = lp.objective()[v.0];
                    lp.set_cost(v, c + dc);
                }
            }
            CarbonTerm::Omitted => {}
        },
        PolicyKind::None => {}
    }
    Ok((lp, layout))
}

/// A solved scenario: inputs, LP, column layout and solution.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub scenario: Scenario,
    pub lp: LpProblem,
    pub layout: VarLayout,
    pub solution: Solution,
}

impl ModelRun {
    pub fn is_optimal(&self) -> bool {
        self.solution.status == Status::Optimal
    }

    pub fn value(&self, v: VarId) -> f64 {
        self.solution.primal[v.0]
    }

    pub fn series(&self, vars: &[VarId]) -> Vec<f64> {
        vars.iter().map(|&v| self.value(v)).collect()
    }

    pub fn total(&self, vars: &[VarId]) -> f64 {
        vars.iter().fold(0.0, |a, &v| a + self.value(v))
    }

    /// Hourly balance duals λ_t.
    pub fn prices(&self) -> Vec<f64> {
        self.layout
            .balance_rows
            .iter()
            .map(|&r| self.solution.row_dual(r))
            .collect()
    }

    /// Raw dual of the policy row (0 without one).
    pub fn policy_dual(&self) -> f64 {
        self.layout
            .policy_row
            .map_or(0.0, |r| self.solution.row_dual(r))
    }

    /// Multiplier of the policy constraint in its natural sign (>= 0).
    pub fn policy_mu(&self) -> f64 {
        match self.layout.policy_row {
            Some(r) => match self.lp.row(r).sense {
                Sense::Le => -self.solution.row_dual(r),
                _ => self.solution.row_dual(r),
            },
            None => 0.0,
        }
    }

    /// Built capacity per technology and storage component, keyed by name
    /// (`pv`, `storage.in`, `storage.out`, `storage.level`).
    pub fn capacities(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        for t in &self.layout.techs {
            m.insert(t.name.clone(), self.value(t.capacity));
        }
        for s in &self.layout.storages {
            m.insert(format!("{}.in", s.name), self.value(s.cap_in));
            m.insert(format!("{}.out", s.name), self.value(s.cap_out));
            m.insert(format!("{}.level", s.name), self.value(s.cap_level));
        }
        m
    }

    /// Σ G over renewable (`true`) or conventional (`false`) technologies.
    pub fn generation_total(&self, renewable: bool) -> f64 {
        self.layout
            .techs
            .iter()
            .filter(|t| t.renewable == renewable)
            .map(|t| self.total(&t.generation))
            .sum()
    }

    pub fn curtailment_total(&self) -> f64 {
        self.layout.techs.iter().map(|t| self.total(&t.curtailment)).sum()
    }

    /// Σ_r,t (G_in − G_out).
    pub fn storage_losses(&self) -> f64 {
        self.layout
            .storages
            .iter()
            .map(|s| self.total(&s.charge) - self.total(&s.discharge))
            .sum()
    }
}

/// Builds and solves `s` with `solver`.
pub fn solve_scenario(s: &Scenario, solver: &dyn LpSolver) -> Result<ModelRun> {
    let (lp, layout) = build_lp(s)?;
    let solution = solver.solve(&lp)?;
    Ok(ModelRun {
        scenario: s.clone(),
        lp,
        layout,
        solution,
    })
}
