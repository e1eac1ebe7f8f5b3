//! Dev probe: full pipeline timing and metric ranges per (scenario, system).

use std::time::Instant;

use owc_core::allocator::{self, AllocationProblem, ObjectiveMode};
use owc_core::channel::{gain_tensor, TraceConfig};
use owc_core::metrics;
use owc_core::receiver::Adr;
use owc_core::scenarios;
use owc_core::Wavelength;

fn main() {
    for scenario in [1u8, 2] {
        for system in [1u8, 2, 3] {
            let spec = scenarios::builtin(scenario, system).unwrap();
            let receivers: Vec<Adr> = spec
                .users
                .iter()
                .map(|&p| Adr::for_system(p, system).unwrap())
                .collect();

            let t = Instant::now();
            let mut cfg = TraceConfig::default();
            cfg.include_second_order = std::env::args().nth(1).as_deref() != Some("fast");
            let tensor = gain_tensor(&spec.room, &spec.aps, &receivers, &cfg).unwrap();
            let trace_time = t.elapsed();

            let t = Instant::now();
            let problem = AllocationProblem {
                tensor: &tensor,
                aps: &spec.aps,
                noise: &spec.noise,
                wavelengths: &Wavelength::ALL,
                objective: ObjectiveMode::SumLinearSinr,
            };
            let best = allocator::solve_exact(&problem).unwrap();
            let solve_time = t.elapsed();

            let eval = allocator::evaluate_assignment(&problem, &best.users).unwrap();
            let reference = spec.reference.as_ref().unwrap();
            let ref_eval = allocator::evaluate_assignment(&problem, reference).unwrap();

            let mut matches = 0;
            for (ours, theirs) in best.users.iter().zip(reference) {
                if ours.ap_id == theirs.ap_id && ours.wavelength == theirs.wavelength {
                    matches += 1;
                }
            }
            println!(
                "s{scenario} sys{system}: trace {:.1}s solve {:.2}s obj {:.1} ref_obj {:.1} concord {}/8",
                trace_time.as_secs_f64(),
                solve_time.as_secs_f64(),
                best.objective_value,
                ref_eval.sum_linear,
                matches
            );
            for (u, (ua, s)) in best
                .users
                .iter()
                .zip(&eval.per_user_sinr_linear)
                .enumerate()
            {
                let slots: Vec<_> = best.users.iter().copied().map(Some).collect();
                let report =
                    metrics::link_report(u, &slots, &tensor, &spec.aps, &spec.noise).unwrap();
                let bw = report
                    .channel_bandwidth
                    .map(|b| {
                        format!(
                            "{:.2} GHz{}",
                            b.hz / 1e9,
                            if b.is_lower_bound { "+" } else { "" }
                        )
                    })
                    .unwrap_or_else(|| "n/a".into());
                let refrow = reference[u];
                println!(
                    "  u{u} ({:.1},{:.1}): ap{} {} b{} sinr {:.1} dB bw {} | ref ap{} {} b{} sinr {:.1} dB",
                    spec.users[u].x,
                    spec.users[u].y,
                    ua.ap_id,
                    ua.wavelength,
                    ua.branch_id,
                    metrics::to_db(*s),
                    bw,
                    refrow.ap_id,
                    refrow.wavelength,
                    refrow.branch_id,
                    metrics::to_db(ref_eval.per_user_sinr_linear[u]),
                );
            }
        }
    }
}
