//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N PASS|FAIL` line; run with `--nocapture` to see them.

mod common;

use std::time::Duration;

use common::{criterion, nonincreasing_probs, random_orthogonal_ensemble, rng};
use rand::Rng;
use sepfid::bounds::{
    bound_report, default_subsets, lower_bound_count, lower_bound_subsets, multipartite_upper_bound,
    upper_bound_maximally_entangled, upper_bound_orthogonal_equiprobable, upper_bound_water_filling, CutBound,
    DistinguishableSubset, Mode, Quantity, ReportOptions,
};
use sepfid::catalog::{
    bell_ensemble, ghz_cut_strategy, ghz_ensemble, mes_selection, mes_with_product, s1_s2_sets, three_qubit_basis,
    tilted_bell_basis, verification_suite,
};
use sepfid::ensemble::{Bipartition, Ensemble};
use sepfid::fidelity::{achievable_fidelity, average_fidelity, success_probability};
use sepfid::linalg::{max_schmidt_sq, StateVector};
use sepfid::measurement::{check_perfect_discrimination, computational_basis, make_local_basis_povm, DecodingMap, Povm};
use sepfid::search::{certify, haar_state, random_product_basis, random_product_state, restart_rng, Objective, SearchConfig};

fn cut(s: &Ensemble, label: &str) -> Bipartition {
    Bipartition::parse(label, s.dims()).unwrap().normalized()
}

#[test]
fn criterion_01_bell_ensemble() {
    let pass = criterion(1, "Bell ensemble F_S = p1+p2", Duration::from_secs(1), || {
        let mut r = rng(101);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let p = nonincreasing_probs(4, &mut r);
            let entry = bell_ensemble([p[0], p[1], p[2], p[3]]).unwrap();
            let s = &entry.ensemble;
            let target = p[0] + p[1];
            let lower = lower_bound_subsets(s, &default_subsets(s), true).unwrap().raw;
            let upper = upper_bound_water_filling(s, &cut(s, "A:B")).unwrap().raw;
            let st = &entry.strategies[0];
            let f = average_fidelity(s, &st.povm, st.decoding.as_ref().unwrap()).unwrap();
            worst = worst.max((lower - target).abs()).max((upper - target).abs()).max((f - target).abs());
        }
        (worst <= 1e-9, format!("max deviation {worst:.1e} over 100 probability vectors (tolerance 1e-9)"))
    });
    assert!(pass);
}

#[test]
fn criterion_02_ghz_ensemble() {
    let pass = criterion(2, "GHZ ensemble bound p1+p2 at A:BC, perfect discrimination at B:AC and C:AB", Duration::from_secs(1), || {
        let mut ok = true;
        let mut notes = Vec::new();
        for p in [[0.25; 4], [0.4, 0.3, 0.2, 0.1]] {
            let s = ghz_ensemble(p).unwrap().ensemble;
            let target = p[0] + p[1];
            let m = multipartite_upper_bound(&s, CutBound::WaterFilling).unwrap();
            let at_a = m.per_cut.iter().find(|b| b.cut.as_ref().unwrap().label() == "A:BC").unwrap().raw;
            ok &= (m.best.raw - target).abs() <= 1e-8 && (at_a - target).abs() <= 1e-8;
            notes.push(format!("p = {p:?}: min over cuts {:.6}, A:BC {at_a:.6}", m.best.raw));
            for label in ["B:AC", "C:AB"] {
                let (regrouped, st) = ghz_cut_strategy(p, label).unwrap();
                let perfect = check_perfect_discrimination(&regrouped, &st.povm, st.decoding.as_ref().unwrap()).unwrap();
                ok &= perfect;
                notes.push(format!("{label} perfect: {perfect}"));
            }
        }
        (ok, notes.join(", "))
    });
    assert!(pass);
}

#[test]
fn criterion_03_tilted_and_three_qubit_bases() {
    let pass = criterion(3, "tilted Bell and three-qubit bases F_S = alpha^2", Duration::from_secs(1), || {
        let mut worst: f64 = 0.0;
        for a2 in [0.5f64, 0.64, 0.75, 0.9] {
            let alpha = a2.sqrt();
            let comp2 = make_local_basis_povm(&[computational_basis(2), computational_basis(2)]).unwrap();
            let comp3 = make_local_basis_povm(&[computational_basis(2), computational_basis(2), computational_basis(2)]).unwrap();

            let t = tilted_bell_basis(alpha).unwrap().ensemble;
            let upper = upper_bound_orthogonal_equiprobable(&t, &cut(&t, "A:B")).unwrap().raw;
            let achieved = average_fidelity(&t, &comp2, &DecodingMap::members(&[0, 2, 3, 1])).unwrap();
            worst = worst.max((upper - a2).abs()).max((achieved - a2).abs());

            let q = three_qubit_basis(alpha).unwrap().ensemble;
            let m = multipartite_upper_bound(&q, CutBound::OrthogonalEquiprobable).unwrap();
            let achieved = achievable_fidelity(&q, &comp3).unwrap().achievable_fidelity;
            worst = worst.max((m.best.raw - a2).abs()).max((achieved - a2).abs());
            for b in &m.per_cut {
                worst = worst.max((b.raw - a2).abs());
            }
        }
        (worst <= 1e-9, format!("max deviation {worst:.1e} (tolerance 1e-9)"))
    });
    assert!(pass);
}

#[test]
fn criterion_04_maximally_entangled_selection() {
    let pass = criterion(4, "maximally entangled selections F_S = d/N", Duration::from_secs(1), || {
        let mut worst: f64 = 0.0;
        let mut declared = true;
        for (d, n) in [(2, 3), (2, 4), (3, 4), (3, 7), (3, 9)] {
            let entry = mes_selection(d, n, 0).unwrap();
            let s = &entry.ensemble;
            let target = d as f64 / n as f64;
            let upper = upper_bound_maximally_entangled(s, &cut(s, "A:B")).unwrap().raw;
            let sk = DistinguishableSubset::declared((0..d).collect());
            sk.validate(s).unwrap();
            let lower = lower_bound_subsets(s, std::slice::from_ref(&sk), false).unwrap();
            declared &= lower.mode == Some(Mode::Declared);
            let count = lower_bound_count(n, sk.members().len()).unwrap().raw;
            worst = worst.max((upper - target).abs()).max((count - target).abs());
        }
        (worst <= 1e-9 && declared, format!("max deviation {worst:.1e} (tolerance 1e-9), S_k declared: {declared}"))
    });
    assert!(pass);
}

#[test]
fn criterion_05_maximally_entangled_with_product() {
    let pass = criterion(5, "three maximally entangled states plus |00>: P_s = 1 - min(p/3, q)", Duration::from_secs(1), || {
        let mut worst: f64 = 0.0;
        for p in [0.05, 0.1, 0.2, 0.3, 1.0 / 3.0 - 1e-3] {
            let s = mes_with_product(p).unwrap().ensemble;
            let q = 1.0 - 3.0 * p;
            let expected_upper = if q <= p / 3.0 { 1.0 - q } else { 1.0 - p / 3.0 };
            let upper = upper_bound_water_filling(&s, &cut(&s, "A:B")).unwrap().raw;
            let comp = make_local_basis_povm(&[computational_basis(3), computational_basis(3)]).unwrap();
            let ps = success_probability(&s, &comp, None).unwrap();
            worst = worst.max((upper - expected_upper).abs()).max((ps - (1.0 - (p / 3.0).min(q))).abs());
        }
        (worst <= 1e-9, format!("max deviation {worst:.1e} (tolerance 1e-9), boundary q = p/3 at p = 0.3 included"))
    });
    assert!(pass);
}

#[test]
fn criterion_06_s1_and_s2() {
    let pass = criterion(6, "S1: P_s = F_S = 3/4; S2: P_s = 1/2, F_S = 3/4", Duration::from_secs(5), || {
        let (s1, s2) = s1_s2_sets();
        let mut ok = true;
        let r1 = bound_report(&s1.ensemble, &s1.report_options()).unwrap();
        ok &= r1.success.determined && (r1.success.lower - 0.75).abs() <= 1e-9;
        ok &= r1.fidelity.determined && (r1.fidelity.lower - 0.75).abs() <= 1e-9;

        let e = &s2.ensemble;
        let comp = make_local_basis_povm(&[computational_basis(2), computational_basis(2)]).unwrap();
        let ps = success_probability(e, &comp, None).unwrap();
        ok &= (ps - 0.5).abs() <= 1e-9;
        let mut r = rng(606);
        let mut worst_sample: f64 = 0.0;
        for _ in 0..1000 {
            let m = random_product_basis(&[2, 2], &mut r).unwrap();
            worst_sample = worst_sample.max(success_probability(e, &m, None).unwrap());
        }
        ok &= worst_sample <= 0.5 + 1e-8;
        let spectrum = e.rho_prime_spectrum();
        let spec_dev = spectrum.iter().zip([0.5, 0.25, 0.25, 0.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let r2 = bound_report(e, &s2.report_options()).unwrap();
        let ky_fan = r2.find(sepfid::bounds::BoundKind::KyFan, None).unwrap().raw;
        ok &= spec_dev <= 1e-9 && (ky_fan - 0.75).abs() <= 1e-9;
        ok &= r2.fidelity.determined && (r2.fidelity.lower - 0.75).abs() <= 1e-9;
        ok &= r2.success.determined && (r2.success.lower - 0.5).abs() <= 1e-9;
        (
            ok,
            format!(
                "S2 computational P_s {ps:.6}, best of 1000 samples {worst_sample:.6}, rho' spectrum deviation {spec_dev:.1e}, Ky Fan {ky_fan:.6}"
            ),
        )
    });
    assert!(pass);
}

#[test]
fn criterion_07_orthogonal_success_equals_fidelity() {
    let pass = criterion(7, "orthogonal ensembles: P_s(ML) = F(M)", Duration::from_secs(30), || {
        let mut r = rng(707);
        let mut worst: f64 = 0.0;
        let shapes: [&[usize]; 6] = [&[2, 2], &[2, 3], &[2, 2, 2], &[2, 2, 3], &[2, 2, 2, 2], &[4, 4]];
        for t in 0..200 {
            let dims = shapes[t % shapes.len()];
            let total: usize = dims.iter().product();
            let n = r.gen_range(1..=total);
            let s = random_orthogonal_ensemble(dims, n, &mut r);
            for _ in 0..5 {
                let m = random_product_basis(dims, &mut r).unwrap();
                let f = achievable_fidelity(&s, &m).unwrap().achievable_fidelity;
                let ps = success_probability(&s, &m, None).unwrap();
                worst = worst.max((f - ps).abs());
            }
        }
        (worst <= 1e-9, format!("max |P_s - F| {worst:.1e} over 200 ensembles x 5 measurements (tolerance 1e-9)"))
    });
    assert!(pass);
}

/// Expected to fail: 10^4 Haar-random product vectors do not come within
/// 1e-2 of the largest Schmidt coefficient for most states at these sizes.
#[test]
fn criterion_08_product_overlap_bounded_by_schmidt_coefficient() {
    let pass = criterion(8, "product-vector overlap <= lambda_1, sampled max >= lambda_1 - 1e-2", Duration::from_secs(30), || {
        let mut r = rng(808);
        let mut bound_ok = true;
        let mut worst_gap: f64 = 0.0;
        let mut short = 0;
        for _ in 0..100 {
            let dims = [r.gen_range(2..=4), r.gen_range(2..=6)];
            let psi = haar_state(&dims, &mut r).unwrap();
            let lambda1 = max_schmidt_sq(&psi, &Bipartition::new(&dims, &[0]).unwrap()).unwrap();
            let mut best: f64 = 0.0;
            for _ in 0..10_000 {
                let chi: StateVector = random_product_state(&dims, &mut r).unwrap();
                let o = chi.overlap_sq(&psi);
                bound_ok &= o <= lambda1 + 1e-10;
                best = best.max(o);
            }
            worst_gap = worst_gap.max(lambda1 - best);
            if best < lambda1 - 1e-2 {
                short += 1;
            }
        }
        (
            bound_ok && short == 0,
            format!(
                "upper bound held: {bound_ok}; states whose sampled max fell short of lambda_1 - 1e-2: {short} of 100, worst gap {worst_gap:.3}"
            ),
        )
    });
    assert!(pass);
}

#[test]
fn criterion_09_search_soundness_and_tightness() {
    let pass = criterion(9, "search never beats an upper bound and reaches every known value", Duration::from_secs(120), || {
        let mut violations = 0;
        let mut misses = Vec::new();
        let mut checked = 0;
        for entry in verification_suite() {
            let s = &entry.ensemble;
            let report = bound_report(s, &ReportOptions::default()).unwrap();
            let seeds: Vec<_> = entry.strategies.iter().map(|x| x.povm.clone()).collect();
            for (objective, sandwich, quantity) in [
                (Objective::Fidelity, &report.fidelity, Quantity::SeparableFidelity),
                (Objective::Success, &report.success, Quantity::SeparableSuccess),
            ] {
                let result = certify(s, &SearchConfig::with_objective(objective), &seeds).unwrap();
                let mut values = result.trace.clone();
                values.push(result.best_value);
                let mut sample_rng = restart_rng(909, checked);
                for _ in 0..100 {
                    let m = random_product_basis(s.dims(), &mut sample_rng).unwrap();
                    values.push(match objective {
                        Objective::Fidelity => achievable_fidelity(s, &m).unwrap().achievable_fidelity,
                        Objective::Success => success_probability(s, &m, None).unwrap(),
                    });
                }
                violations += values.iter().filter(|&&v| v > sandwich.upper + 1e-8).count();
                if let Some(k) = entry.known(quantity) {
                    if (result.best_value - k).abs() > 1e-6 {
                        misses.push(format!("{} {}: {} vs {k}", entry.description, quantity.name(), result.best_value));
                    }
                }
                checked += 1;
            }
        }
        (
            violations == 0 && misses.is_empty(),
            format!("{checked} searches, {violations} values above an upper bound, misses: {misses:?}"),
        )
    });
    assert!(pass);
}

/// Expected to fail: with 10^4 Haar-random guesses per outcome the best
/// sampled guess typically trails the eigenvector by more than 5e-3.
#[test]
fn criterion_10_eigenvector_decoding_against_sampled_guesses() {
    let pass = criterion(10, "eigenvector decoding >= best of 1e4 random guesses and within 5e-3", Duration::from_secs(60), || {
        let mut r = rng(1010);
        let mut below = 0;
        let mut worst_excess: f64 = 0.0;
        let trials = 50;
        for _ in 0..trials {
            let n = r.gen_range(1..=4);
            let s = common::random_ensemble(&[2, 2], n, &mut r);
            let m = random_product_basis(&[2, 2], &mut r).unwrap();
            let rep = achievable_fidelity(&s, &m).unwrap();
            let mut sampled_total = 0.0;
            for a in 0..m.len() {
                let weights: Vec<f64> = s.states().iter().zip(s.probs()).map(|(psi, p)| p * m.expectation(a, psi)).collect();
                let mut best: f64 = 0.0;
                for _ in 0..10_000 {
                    let phi = haar_state(&[2, 2], &mut r).unwrap();
                    let v: f64 = s.states().iter().zip(&weights).map(|(psi, w)| w * psi.overlap_sq(&phi)).sum();
                    best = best.max(v);
                }
                sampled_total += best;
            }
            let excess = rep.achievable_fidelity - sampled_total;
            if excess < -1e-10 {
                below += 1;
            }
            worst_excess = worst_excess.max(excess);
        }
        (
            below == 0 && worst_excess <= 5e-3,
            format!("{trials} ensembles: eigenvector below sampled best {below} times; largest excess over sampled best {worst_excess:.4} (limit 5e-3)"),
        )
    });
    assert!(pass);
}
