//! Joint (access point, wavelength, branch) assignment maximizing total
//! SINR.
//!
//! [`solve_exact`] is a branch-and-bound search that is guaranteed optimal:
//! adding a user can only add interference, so the interference-free SINR of
//! every unassigned user is an admissible bound. [`solve_bruteforce`] is the
//! independent exhaustive oracle for small instances, and [`export_milp`]
//! writes the equivalent integer program in CPLEX-LP form with a linear
//! surrogate objective.
//!
//! Both solvers score complete candidates with [`evaluate_assignment`] and
//! break objective ties toward the lexicographically smallest
//! (access point, wavelength, branch) vector, so identical inputs always
//! produce identical assignments.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::channel::{AccessPoint, GainTensor};
use crate::metrics::{self, UserAssignment};
use crate::receiver::NoiseModel;
use crate::{Error, Wavelength};

/// How per-user SINRs combine into the allocator objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ObjectiveMode {
    /// Sum of linear SINRs.
    #[default]
    SumLinearSinr,
    /// Sum of SINRs in dB.
    SumDbSinr,
}

impl ObjectiveMode {
    #[inline]
    fn score(self, sinr_linear: f64) -> f64 {
        match self {
            ObjectiveMode::SumLinearSinr => sinr_linear,
            ObjectiveMode::SumDbSinr => metrics::to_db(sinr_linear),
        }
    }
}

/// One allocation instance: the gain tensor plus everything needed to turn
/// gains into SINRs.
#[derive(Clone, Copy, Debug)]
pub struct AllocationProblem<'a> {
    pub tensor: &'a GainTensor,
    pub aps: &'a [AccessPoint],
    pub noise: &'a NoiseModel,
    /// Wavelengths available for assignment (the full RYGB set in the
    /// standard configuration).
    pub wavelengths: &'a [Wavelength],
    pub objective: ObjectiveMode,
}

impl<'a> AllocationProblem<'a> {
    pub fn users(&self) -> usize {
        self.tensor.users()
    }

    fn validate(&self) -> Result<Vec<Wavelength>, Error> {
        if self.aps.len() != self.tensor.aps() {
            return Err(Error::ShapeMismatch {
                users: self.tensor.users(),
                branches: self.tensor.branches(),
                aps: self.aps.len(),
            });
        }
        let mut wavelengths: Vec<Wavelength> = self.wavelengths.to_vec();
        wavelengths.sort_by_key(|w| w.index());
        wavelengths.dedup();
        if wavelengths.is_empty() {
            return Err(Error::Infeasible {
                users: self.users(),
                capacity: 0,
            });
        }
        Ok(wavelengths)
    }
}

/// A complete allocation and its objective value (in the problem's
/// configured mode).
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub users: Vec<UserAssignment>,
    pub objective_value: f64,
}

/// Per-user SINRs and both objective readings for a fixed assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub per_user_sinr_linear: Vec<f64>,
    pub sum_linear: f64,
    pub sum_db: f64,
}

impl Evaluation {
    pub fn objective(&self, mode: ObjectiveMode) -> f64 {
        match mode {
            ObjectiveMode::SumLinearSinr => self.sum_linear,
            ObjectiveMode::SumDbSinr => self.sum_db,
        }
    }
}

fn check_feasible(users: &[UserAssignment]) -> Result<(), Error> {
    for (i, a) in users.iter().enumerate() {
        for (j, b) in users.iter().enumerate().skip(i + 1) {
            if a.ap_id == b.ap_id && a.wavelength == b.wavelength {
                return Err(Error::DuplicateSlot {
                    user_a: i,
                    user_b: j,
                    ap_id: a.ap_id,
                    wavelength: a.wavelength,
                });
            }
        }
    }
    Ok(())
}

/// Scores a complete assignment: per-user SINR plus the summed objective in
/// both modes. Rejects infeasible assignments, naming the offending pair.
pub fn evaluate_assignment(
    problem: &AllocationProblem<'_>,
    users: &[UserAssignment],
) -> Result<Evaluation, Error> {
    if users.len() != problem.users() {
        return Err(Error::IndexOutOfRange {
            entity: "user",
            index: users.len(),
            count: problem.users(),
        });
    }
    check_feasible(users)?;
    let slots: Vec<Option<UserAssignment>> = users.iter().copied().map(Some).collect();
    let mut per_user = Vec::with_capacity(users.len());
    let mut sum_linear = 0.0;
    let mut sum_db = 0.0;
    for u in 0..users.len() {
        let s = metrics::sinr(u, &slots, problem.tensor, problem.aps, problem.noise)?;
        per_user.push(s);
        sum_linear += s;
        sum_db += metrics::to_db(s);
    }
    Ok(Evaluation {
        per_user_sinr_linear: per_user,
        sum_linear,
        sum_db,
    })
}

fn lex_less(a: &[UserAssignment], b: &[UserAssignment]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.lex_key().cmp(&y.lex_key()) {
            core::cmp::Ordering::Less => return true,
            core::cmp::Ordering::Greater => return false,
            core::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Interference-free SINR of `user` on (`ap`, `wavelength`), maximized over
/// branches; returns the best branch (smallest index on exact ties).
fn best_free_sinr(
    problem: &AllocationProblem<'_>,
    scratch: &mut [Option<UserAssignment>],
    user: usize,
    ap_id: u8,
    wavelength: Wavelength,
) -> (u8, f64) {
    let mut best = (1u8, f64::NEG_INFINITY);
    for b in 1..=problem.tensor.branches() as u8 {
        scratch[user] = Some(UserAssignment::new(ap_id, wavelength, b));
        let s = metrics::sinr(user, scratch, problem.tensor, problem.aps, problem.noise)
            .unwrap_or(0.0);
        if s > best.1 {
            best = (b, s);
        }
    }
    scratch[user] = None;
    best
}

/// Exhaustive search over all feasible joint assignments; refuses instances
/// whose full enumeration would exceed ~1e8 combinations.
pub fn solve_bruteforce(problem: &AllocationProblem<'_>) -> Result<Assignment, Error> {
    let wavelengths = problem.validate()?;
    let n_users = problem.users();
    let capacity = problem.aps.len() * wavelengths.len();
    if n_users > capacity {
        return Err(Error::Infeasible {
            users: n_users,
            capacity,
        });
    }
    let per_user = (problem.aps.len() * wavelengths.len() * problem.tensor.branches()) as f64;
    let combinations = libm::pow(per_user, n_users as f64);
    const LIMIT: f64 = 1e8;
    if combinations > LIMIT {
        return Err(Error::SearchTooLarge {
            combinations,
            limit: LIMIT,
        });
    }

    struct Search<'p, 'a> {
        problem: &'p AllocationProblem<'a>,
        wavelengths: &'p [Wavelength],
        current: Vec<UserAssignment>,
        best: Option<Assignment>,
    }

    impl Search<'_, '_> {
        fn recurse(&mut self, user: usize) -> Result<(), Error> {
            if user == self.problem.users() {
                let eval = evaluate_assignment(self.problem, &self.current)?;
                let objective = eval.objective(self.problem.objective);
                let better = match &self.best {
                    None => true,
                    Some(best) => {
                        objective > best.objective_value
                            || (objective == best.objective_value
                                && lex_less(&self.current, &best.users))
                    }
                };
                if better {
                    self.best = Some(Assignment {
                        users: self.current.clone(),
                        objective_value: objective,
                    });
                }
                return Ok(());
            }
            for ap in self.problem.aps {
                for &w in self.wavelengths {
                    if self
                        .current
                        .iter()
                        .any(|c| c.ap_id == ap.id && c.wavelength == w)
                    {
                        continue;
                    }
                    for b in 1..=self.problem.tensor.branches() as u8 {
                        self.current.push(UserAssignment::new(ap.id, w, b));
                        self.recurse(user + 1)?;
                        self.current.pop();
                    }
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        problem,
        wavelengths: &wavelengths,
        current: Vec::with_capacity(n_users),
        best: None,
    };
    search.recurse(0)?;
    search.best.ok_or(Error::Infeasible {
        users: n_users,
        capacity,
    })
}

/// Candidate (access point, wavelength) option for one user, with its
/// interference-free SINR used for bounding and search ordering.
#[derive(Clone, Copy, Debug)]
struct CandidateSlot {
    ap_id: u8,
    wavelength: Wavelength,
    free_sinr: f64,
}

/// Exact branch-and-bound solver.
///
/// Users are expanded in order of decreasing interference-free best SINR;
/// a node is pruned when its optimistic bound (already-assigned users scored
/// under the partial interference plus the interference-free best of every
/// remaining user) cannot reach the incumbent. Interference only grows along
/// a branch, so the bound is admissible and the result is optimal.
pub fn solve_exact(problem: &AllocationProblem<'_>) -> Result<Assignment, Error> {
    let wavelengths = problem.validate()?;
    let n_users = problem.users();
    let capacity = problem.aps.len() * wavelengths.len();
    if n_users > capacity {
        return Err(Error::Infeasible {
            users: n_users,
            capacity,
        });
    }
    if n_users == 0 {
        return Ok(Assignment {
            users: Vec::new(),
            objective_value: 0.0,
        });
    }

    let mut scratch: Vec<Option<UserAssignment>> = vec![None; n_users];

    // Interference-free candidates per user, strongest first.
    let mut options: Vec<Vec<CandidateSlot>> = Vec::with_capacity(n_users);
    for user in 0..n_users {
        let mut opts = Vec::with_capacity(problem.aps.len() * wavelengths.len());
        for ap in problem.aps {
            for &w in &wavelengths {
                let (_b, s) = best_free_sinr(problem, &mut scratch, user, ap.id, w);
                opts.push(CandidateSlot {
                    ap_id: ap.id,
                    wavelength: w,
                    free_sinr: s,
                });
            }
        }
        opts.sort_by(|a, b| {
            b.free_sinr
                .total_cmp(&a.free_sinr)
                .then(a.ap_id.cmp(&b.ap_id))
                .then(a.wavelength.index().cmp(&b.wavelength.index()))
        });
        options.push(opts);
    }

    // Expansion order: strongest best-signal user first.
    let mut order: Vec<usize> = (0..n_users).collect();
    order.sort_by(|&a, &b| {
        options[b][0]
            .free_sinr
            .total_cmp(&options[a][0].free_sinr)
            .then(a.cmp(&b))
    });

    struct Search<'p, 'a> {
        problem: &'p AllocationProblem<'a>,
        options: &'p [Vec<CandidateSlot>],
        order: &'p [usize],
        partial: Vec<Option<UserAssignment>>,
        best: Option<Assignment>,
    }

    impl Search<'_, '_> {
        fn slot_taken(&self, ap_id: u8, wavelength: Wavelength) -> bool {
            self.partial
                .iter()
                .flatten()
                .any(|c| c.ap_id == ap_id && c.wavelength == wavelength)
        }

        /// Optimistic score of the current node: assigned users at their
        /// best branch under the partial interference, remaining users at
        /// the interference-free best among slots still available.
        fn bound(&mut self, depth: usize) -> f64 {
            let mode = self.problem.objective;
            let mut total = 0.0;
            for d in 0..self.order.len() {
                let user = self.order[d];
                if d < depth {
                    let ua = self.partial[user].expect("assigned");
                    let (_b, s) = best_partial_sinr(self.problem, &mut self.partial, user, ua);
                    total += mode.score(s);
                } else {
                    // Options are sorted by decreasing interference-free
                    // SINR, so the first free slot is the user's ceiling.
                    let best_available = self.options[user]
                        .iter()
                        .find(|opt| !self.slot_taken(opt.ap_id, opt.wavelength))
                        .map(|opt| opt.free_sinr)
                        .unwrap_or(f64::NEG_INFINITY);
                    total += mode.score(best_available);
                }
            }
            total
        }

        fn recurse(&mut self, depth: usize) -> Result<(), Error> {
            if depth == self.order.len() {
                // Complete the candidate with each user's best branch under
                // the full interference profile (smallest branch id on
                // ties), then score it canonically.
                let mut candidate = Vec::with_capacity(self.order.len());
                for user in 0..self.partial.len() {
                    let ua = self.partial[user].expect("complete");
                    let (b, _s) = best_partial_sinr(self.problem, &mut self.partial, user, ua);
                    candidate.push(UserAssignment::new(ua.ap_id, ua.wavelength, b));
                }
                let eval = evaluate_assignment(self.problem, &candidate)?;
                let objective = eval.objective(self.problem.objective);
                let better = match &self.best {
                    None => true,
                    Some(best) => {
                        objective > best.objective_value
                            || (objective == best.objective_value
                                && lex_less(&candidate, &best.users))
                    }
                };
                if better {
                    self.best = Some(Assignment {
                        users: candidate,
                        objective_value: objective,
                    });
                }
                return Ok(());
            }
            let user = self.order[depth];
            for i in 0..self.options[user].len() {
                let opt = self.options[user][i];
                let taken = self.partial.iter().flatten().any(|c| {
                    c.ap_id == opt.ap_id && c.wavelength == opt.wavelength
                });
                if taken {
                    continue;
                }
                self.partial[user] = Some(UserAssignment::new(opt.ap_id, opt.wavelength, 1));
                let bound = self.bound(depth + 1);
                let dominated = match &self.best {
                    None => false,
                    Some(best) => {
                        // Small slack keeps floating-point reordering from
                        // pruning an exact tie.
                        let tol = 1e-9 * best.objective_value.abs().max(1.0);
                        bound < best.objective_value - tol
                    }
                };
                if !dominated {
                    self.recurse(depth + 1)?;
                }
                self.partial[user] = None;
            }
            Ok(())
        }
    }

    /// Best branch (and its SINR) for `user` given the other entries of
    /// `partial`; restores the user's stored branch afterwards.
    fn best_partial_sinr(
        problem: &AllocationProblem<'_>,
        partial: &mut [Option<UserAssignment>],
        user: usize,
        ua: UserAssignment,
    ) -> (u8, f64) {
        let saved = partial[user];
        let mut best = (1u8, f64::NEG_INFINITY);
        for b in 1..=problem.tensor.branches() as u8 {
            partial[user] = Some(UserAssignment::new(ua.ap_id, ua.wavelength, b));
            let s = metrics::sinr(user, partial, problem.tensor, problem.aps, problem.noise)
                .unwrap_or(0.0);
            if s > best.1 {
                best = (b, s);
            }
        }
        partial[user] = saved;
        best
    }

    let mut search = Search {
        problem,
        options: &options,
        order: &order,
        partial: vec![None; n_users],
        best: None,
    };
    search.recurse(0)?;
    search.best.ok_or(Error::Infeasible {
        users: n_users,
        capacity,
    })
}

/// Objective currents are exported in microamps so LP coefficients stay in
/// a comfortable fixed-point range.
const LP_CURRENT_SCALE: f64 = 1e6;

fn lp_var_x(user: usize, ap_id: u8, w: Wavelength, branch: usize) -> String {
    format!(
        "x_u{}_a{}_w{}_b{}",
        user,
        ap_id,
        &w.name()[..1],
        branch + 1
    )
}

fn lp_var_z(u: usize, v: usize, ap_u: u8, ap_v: u8, w: Wavelength) -> String {
    format!("z_u{}_u{}_a{}_a{}_w{}", u, v, ap_u, ap_v, &w.name()[..1])
}

/// Writes the assignment problem as a CPLEX-LP text with a documented
/// linear surrogate objective (signal currents minus co-wavelength
/// interference currents; the exact sum-of-SINR ratio objective is not
/// MILP-representable).
///
/// Binaries `x_u<user>_a<ap>_w<wavelength>_b<branch>` select one triple per
/// user; `z` binaries activate on co-wavelength (user, user, AP, AP) pairs
/// through the standard product linearization.
pub fn export_milp(problem: &AllocationProblem<'_>) -> Result<String, Error> {
    let wavelengths = problem.validate()?;
    let tensor = problem.tensor;
    let n_users = problem.users();
    let n_branches = tensor.branches();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ WDMA joint assignment: one (access point, wavelength, branch) per user."
    );
    let _ = writeln!(
        out,
        "\\ Surrogate linear objective: received signal currents minus co-wavelength"
    );
    let _ = writeln!(
        out,
        "\\ interference currents, in microamps. The exact allocator objective is the"
    );
    let _ = writeln!(
        out,
        "\\ (nonlinear) sum of per-user SINRs; this linearization preserves the"
    );
    let _ = writeln!(
        out,
        "\\ signal-vs-interference dominance structure but not the ratio values."
    );
    let _ = writeln!(out, "Maximize");
    let _ = writeln!(out, " obj:");
    for user in 0..n_users {
        for ap in problem.aps {
            for &w in &wavelengths {
                let r = problem.noise.responsivity(w);
                for b in 0..n_branches {
                    let signal = r
                        * ap.power_w[w.index()]
                        * tensor.dc_gain(user, b, ap.id as usize - 1)
                        * LP_CURRENT_SCALE;
                    let _ = writeln!(out, " + {:.9} {}", signal, lp_var_x(user, ap.id, w, b));
                }
            }
        }
    }
    // Interference penalties: ordered user pairs on a shared wavelength.
    // The surrogate cannot see which branch u ends up on, so the worst
    // branch gain stands in. Pairs with zero cross-gain are dropped.
    let worst_gain = |user: usize, ap_id: u8| -> f64 {
        (0..n_branches)
            .map(|b| tensor.dc_gain(user, b, ap_id as usize - 1))
            .fold(0.0f64, f64::max)
    };
    let interference_current = |u: usize, ap_v: &AccessPoint, w: Wavelength| -> f64 {
        problem.noise.responsivity(w)
            * ap_v.power_w[w.index()]
            * worst_gain(u, ap_v.id)
            * LP_CURRENT_SCALE
    };
    let mut z_vars: Vec<String> = Vec::new();
    for u in 0..n_users {
        for v in 0..n_users {
            if u == v {
                continue;
            }
            for ap_u in problem.aps {
                for ap_v in problem.aps {
                    if ap_u.id == ap_v.id {
                        continue;
                    }
                    for &w in &wavelengths {
                        let current = interference_current(u, ap_v, w);
                        if current > 0.0 {
                            let name = lp_var_z(u, v, ap_u.id, ap_v.id, w);
                            let _ = writeln!(out, " - {:.9} {}", current, name);
                            z_vars.push(name);
                        }
                    }
                }
            }
        }
    }

    let _ = writeln!(out, "Subject To");
    for user in 0..n_users {
        let mut line = format!(" assign_u{}:", user);
        for ap in problem.aps {
            for &w in &wavelengths {
                for b in 0..n_branches {
                    let _ = write!(line, " + {}", lp_var_x(user, ap.id, w, b));
                }
            }
        }
        let _ = writeln!(out, "{} = 1", line);
    }
    for ap in problem.aps {
        for &w in &wavelengths {
            let mut line = format!(" cap_a{}_w{}:", ap.id, &w.name()[..1]);
            for user in 0..n_users {
                for b in 0..n_branches {
                    let _ = write!(line, " + {}", lp_var_x(user, ap.id, w, b));
                }
            }
            let _ = writeln!(out, "{} <= 1", line);
        }
    }
    // z >= x_u + x_v - 1, z <= x_u, z <= x_v with x_* summed over branches.
    for u in 0..n_users {
        for v in 0..n_users {
            if u == v {
                continue;
            }
            for ap_u in problem.aps {
                for ap_v in problem.aps {
                    if ap_u.id == ap_v.id {
                        continue;
                    }
                    for &w in &wavelengths {
                        if interference_current(u, ap_v, w) <= 0.0 {
                            continue;
                        }
                        let name = lp_var_z(u, v, ap_u.id, ap_v.id, w);
                        let mut lb = format!(" zlb_{}: {}", name, name);
                        let mut ub_u = format!(" zubu_{}: {}", name, name);
                        let mut ub_v = format!(" zubv_{}: {}", name, name);
                        for b in 0..n_branches {
                            let _ = write!(lb, " - {}", lp_var_x(u, ap_u.id, w, b));
                            let _ = write!(ub_u, " - {}", lp_var_x(u, ap_u.id, w, b));
                        }
                        for b in 0..n_branches {
                            let _ = write!(lb, " - {}", lp_var_x(v, ap_v.id, w, b));
                            let _ = write!(ub_v, " - {}", lp_var_x(v, ap_v.id, w, b));
                        }
                        let _ = writeln!(out, "{} >= -1", lb);
                        let _ = writeln!(out, "{} <= 0", ub_u);
                        let _ = writeln!(out, "{} <= 0", ub_v);
                    }
                }
            }
        }
    }

    let _ = writeln!(out, "Binary");
    for user in 0..n_users {
        for ap in problem.aps {
            for &w in &wavelengths {
                for b in 0..n_branches {
                    let _ = writeln!(out, " {}", lp_var_x(user, ap.id, w, b));
                }
            }
        }
    }
    for name in &z_vars {
        let _ = writeln!(out, " {}", name);
    }
    let _ = writeln!(out, "End");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::scenarios::demo_wdma;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn unit(id: u8) -> AccessPoint {
        AccessPoint::unit(id, Vec3::new(f64::from(id), 1.0, 3.0))
    }

    #[test]
    fn one_user_takes_the_interference_free_argmax() {
        let aps = [unit(1), unit(2)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(1, 1, 2, vec![5e-7, 2e-6]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &Wavelength::ALL,
            objective: ObjectiveMode::SumLinearSinr,
        };
        let got = solve_exact(&problem).unwrap();
        // Strongest gain on unit 2; Red carries the most power and the
        // highest responsivity.
        assert_eq!(got.users, vec![UserAssignment::new(2, Wavelength::Red, 1)]);
        let eval = evaluate_assignment(&problem, &got.users).unwrap();
        assert_eq!(got.objective_value, eval.sum_linear);
        assert_eq!(got, solve_bruteforce(&problem).unwrap());
    }

    #[test]
    fn one_ap_forces_distinct_wavelengths() {
        let aps = [unit(1)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(2, 1, 1, vec![2e-6, 1.5e-6]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &[Wavelength::Red, Wavelength::Yellow],
            objective: ObjectiveMode::SumLinearSinr,
        };
        let got = solve_bruteforce(&problem).unwrap();
        assert_ne!(got.users[0].wavelength, got.users[1].wavelength);
        assert_eq!(got, solve_exact(&problem).unwrap());
        // The stronger user gets the stronger wavelength.
        assert_eq!(got.users[0].wavelength, Wavelength::Red);
    }

    #[test]
    fn demo_instance_shields_the_exposed_user_on_blue() {
        let demo = demo_wdma();
        let problem = AllocationProblem {
            tensor: &demo.tensor,
            aps: &demo.aps,
            noise: &demo.noise,
            wavelengths: &demo.wavelengths,
            objective: ObjectiveMode::SumLinearSinr,
        };
        let got = solve_exact(&problem).unwrap();
        assert_eq!(
            got.users,
            vec![
                UserAssignment::new(1, Wavelength::Blue, 1),
                UserAssignment::new(2, Wavelength::Red, 1),
                UserAssignment::new(3, Wavelength::Red, 1),
            ]
        );
        assert_eq!(got, solve_bruteforce(&problem).unwrap());
    }

    #[test]
    fn evaluate_rejects_shared_slots() {
        let aps = [unit(1), unit(2)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(2, 1, 2, vec![1e-6, 2e-7, 3e-7, 9e-7]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &Wavelength::ALL,
            objective: ObjectiveMode::SumLinearSinr,
        };
        let clash = [
            UserAssignment::new(1, Wavelength::Red, 1),
            UserAssignment::new(1, Wavelength::Red, 1),
        ];
        assert_eq!(
            evaluate_assignment(&problem, &clash).unwrap_err(),
            Error::DuplicateSlot {
                user_a: 0,
                user_b: 1,
                ap_id: 1,
                wavelength: Wavelength::Red
            }
        );
    }

    #[test]
    fn empty_interference_matches_interference_free_values() {
        let aps = [unit(1), unit(2)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(2, 1, 2, vec![1e-6, 2e-7, 3e-7, 9e-7]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &Wavelength::ALL,
            objective: ObjectiveMode::SumLinearSinr,
        };
        let users = [
            UserAssignment::new(1, Wavelength::Red, 1),
            UserAssignment::new(2, Wavelength::Yellow, 1),
        ];
        let eval = evaluate_assignment(&problem, &users).unwrap();
        for (u, &ua) in users.iter().enumerate() {
            let mut alone = vec![None, None];
            alone[u] = Some(ua);
            let free = metrics::sinr(u, &alone, &tensor, &aps, &noise).unwrap();
            assert_eq!(eval.per_user_sinr_linear[u], free);
        }
    }

    #[test]
    fn swapping_users_of_a_symmetric_instance_keeps_the_objective() {
        // Two indistinguishable users: exchanging their complete triples
        // permutes the per-user SINRs and leaves the sum unchanged.
        let aps = [unit(1), unit(2)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(2, 1, 2, vec![2e-6, 4e-7, 2e-6, 4e-7]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &[Wavelength::Red],
            objective: ObjectiveMode::SumLinearSinr,
        };
        let forward = [
            UserAssignment::new(1, Wavelength::Red, 1),
            UserAssignment::new(2, Wavelength::Red, 1),
        ];
        let swapped = [
            UserAssignment::new(2, Wavelength::Red, 1),
            UserAssignment::new(1, Wavelength::Red, 1),
        ];
        let a = evaluate_assignment(&problem, &forward).unwrap();
        let b = evaluate_assignment(&problem, &swapped).unwrap();
        assert_eq!(a.sum_linear, b.sum_linear);
    }

    #[test]
    fn infeasible_when_slots_run_out() {
        let aps = [unit(1)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(3, 1, 1, vec![1e-6, 1e-6, 1e-6]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &[Wavelength::Red, Wavelength::Blue],
            objective: ObjectiveMode::SumLinearSinr,
        };
        assert_eq!(
            solve_exact(&problem).unwrap_err(),
            Error::Infeasible {
                users: 3,
                capacity: 2
            }
        );
        assert_eq!(
            solve_bruteforce(&problem).unwrap_err(),
            Error::Infeasible {
                users: 3,
                capacity: 2
            }
        );
    }

    #[test]
    fn bruteforce_refuses_oversized_instances() {
        let aps: Vec<AccessPoint> = (1..=8).map(unit).collect();
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(10, 4, 8, vec![0.0; 10 * 4 * 8]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &Wavelength::ALL,
            objective: ObjectiveMode::SumLinearSinr,
        };
        match solve_bruteforce(&problem).unwrap_err() {
            Error::SearchTooLarge { combinations, .. } => assert!(combinations > 1e8),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn solvers_are_deterministic() {
        let demo = demo_wdma();
        let problem = AllocationProblem {
            tensor: &demo.tensor,
            aps: &demo.aps,
            noise: &demo.noise,
            wavelengths: &demo.wavelengths,
            objective: ObjectiveMode::SumDbSinr,
        };
        let a = solve_exact(&problem).unwrap();
        let b = solve_exact(&problem).unwrap();
        assert_eq!(a, b);
    }

    /// Minimal CPLEX-LP reader for the exported objective: maps variable
    /// names to signed coefficients.
    fn parse_objective(lp: &str) -> HashMap<String, f64> {
        let mut coeffs = HashMap::new();
        let mut in_objective = false;
        for line in lp.lines() {
            let trimmed = line.trim();
            if trimmed == "obj:" {
                in_objective = true;
                continue;
            }
            if trimmed == "Subject To" {
                break;
            }
            if !in_objective || trimmed.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            assert_eq!(tokens.len(), 3, "unexpected objective line {trimmed:?}");
            let sign = match tokens[0] {
                "+" => 1.0,
                "-" => -1.0,
                other => panic!("unexpected sign {other:?}"),
            };
            let coeff: f64 = tokens[1].parse().unwrap();
            *coeffs.entry(tokens[2].to_string()).or_insert(0.0) += sign * coeff;
        }
        coeffs
    }

    #[test]
    fn milp_export_trivial_instance_has_one_binary_and_two_constraints() {
        let aps = [unit(1)];
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(1, 1, 1, vec![1e-6]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &[Wavelength::Red],
            objective: ObjectiveMode::SumLinearSinr,
        };
        let lp = export_milp(&problem).unwrap();
        let binaries: Vec<&str> = lp
            .lines()
            .skip_while(|l| l.trim() != "Binary")
            .skip(1)
            .take_while(|l| l.trim() != "End")
            .map(str::trim)
            .collect();
        assert_eq!(binaries, vec!["x_u0_a1_wR_b1"]);
        assert!(!lp.contains("z_"));
        let constraints = lp
            .lines()
            .filter(|l| l.trim_start().starts_with("assign_") || l.trim_start().starts_with("cap_"))
            .count();
        assert_eq!(constraints, 2);
        assert!(lp.contains("Surrogate linear objective"));
    }

    #[test]
    fn milp_export_paper_scale_has_1024_assignment_binaries() {
        let aps: Vec<AccessPoint> = (1..=8).map(unit).collect();
        let noise = NoiseModel::default();
        let tensor = GainTensor::from_dc(8, 4, 8, vec![0.0; 8 * 4 * 8]);
        let problem = AllocationProblem {
            tensor: &tensor,
            aps: &aps,
            noise: &noise,
            wavelengths: &Wavelength::ALL,
            objective: ObjectiveMode::SumLinearSinr,
        };
        let lp = export_milp(&problem).unwrap();
        let x_binaries = lp
            .lines()
            .skip_while(|l| l.trim() != "Binary")
            .filter(|l| l.trim_start().starts_with("x_"))
            .count();
        assert_eq!(x_binaries, 1024);
    }

    #[test]
    fn milp_surrogate_optimum_matches_exact_on_the_demo_instance() {
        let demo = demo_wdma();
        let problem = AllocationProblem {
            tensor: &demo.tensor,
            aps: &demo.aps,
            noise: &demo.noise,
            wavelengths: &demo.wavelengths,
            objective: ObjectiveMode::SumLinearSinr,
        };
        let lp = export_milp(&problem).unwrap();
        let coeffs = parse_objective(&lp);

        // Enumerate every feasible joint assignment and score it exactly as
        // the LP text defines: active x coefficients plus active z
        // penalties.
        let mut best: Option<(f64, Vec<UserAssignment>)> = None;
        let options: Vec<(u8, Wavelength)> = demo
            .aps
            .iter()
            .flat_map(|ap| demo.wavelengths.iter().map(move |&w| (ap.id, w)))
            .collect();
        for &a in &options {
            for &b in &options {
                for &c in &options {
                    let picks = [a, b, c];
                    let feasible = (0..3).all(|i| (i + 1..3).all(|j| picks[i] != picks[j]));
                    if !feasible {
                        continue;
                    }
                    let mut value = 0.0;
                    for (u, &(ap, w)) in picks.iter().enumerate() {
                        value += coeffs[&lp_var_x(u, ap, w, 0)];
                    }
                    for (u, &(ap_u, w_u)) in picks.iter().enumerate() {
                        for (v, &(ap_v, w_v)) in picks.iter().enumerate() {
                            if u == v || w_u != w_v || ap_u == ap_v {
                                continue;
                            }
                            value += *coeffs
                                .get(&lp_var_z(u, v, ap_u, ap_v, w_u))
                                .unwrap_or(&0.0);
                        }
                    }
                    let candidate: Vec<UserAssignment> = picks
                        .iter()
                        .map(|&(ap, w)| UserAssignment::new(ap, w, 1))
                        .collect();
                    let better = match &best {
                        None => true,
                        Some((best_value, best_users)) => {
                            value > *best_value
                                || (value == *best_value && lex_less(&candidate, best_users))
                        }
                    };
                    if better {
                        best = Some((value, candidate));
                    }
                }
            }
        }
        let surrogate = best.unwrap().1;
        let exact = solve_exact(&problem).unwrap();
        assert_eq!(surrogate, exact.users);
    }

    const WAVELENGTH_SUBSETS: [&[Wavelength]; 4] = [
        &[Wavelength::Red],
        &[Wavelength::Blue],
        &[Wavelength::Red, Wavelength::Blue],
        &[Wavelength::Yellow, Wavelength::Green],
    ];

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn exact_matches_bruteforce(
            n_users in 1..=4usize,
            n_aps in 1..=3usize,
            n_branches in 1..=2usize,
            subset in 0..WAVELENGTH_SUBSETS.len(),
            objective in prop::bool::ANY,
            seed_gains in prop::collection::vec(1e-8..1e-5f64, 4 * 2 * 3),
        ) {
            let wavelengths = WAVELENGTH_SUBSETS[subset];
            prop_assume!(n_users <= n_aps * wavelengths.len());
            let aps: Vec<AccessPoint> = (1..=n_aps as u8).map(unit).collect();
            let noise = NoiseModel::default();
            let dc: Vec<f64> = seed_gains
                .iter()
                .copied()
                .take(n_users * n_branches * n_aps)
                .collect();
            let tensor = GainTensor::from_dc(n_users, n_branches, n_aps, dc);
            let problem = AllocationProblem {
                tensor: &tensor,
                aps: &aps,
                noise: &noise,
                wavelengths,
                objective: if objective {
                    ObjectiveMode::SumLinearSinr
                } else {
                    ObjectiveMode::SumDbSinr
                },
            };
            let exact = solve_exact(&problem).unwrap();
            let brute = solve_bruteforce(&problem).unwrap();
            prop_assert_eq!(&exact.users, &brute.users);
            prop_assert_eq!(exact.objective_value, brute.objective_value);
        }
    }
}
