//! Exhaustive check of the linear reformulation on toy QCBOs.

use agvsched::milp::{check_milp_feasibility, linearize_qcbo, MilpAssignment};
use agvsched::qcbo::{Family, LinearForm, QcboModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every (x, w) point of the linearized model: feasible exactly when w is
/// the product of its factors and x is QCBO-feasible.
fn check(q: &QcboModel) -> usize {
    let m = linearize_qcbo(q).unwrap();
    let n = q.num_vars();
    let aux: Vec<(usize, usize)> = m.vars()[n..]
        .iter()
        .map(|v| {
            let mut it = v.name.trim_start_matches("w_").split('_').map(|s| s.parse::<usize>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let total = m.vars().len();
    assert!(total <= 22, "toy too large: {total}");
    let mut feasible_x = 0;
    for code in 0u32..(1 << total) {
        let bits: Vec<bool> = (0..total).map(|b| code >> b & 1 == 1).collect();
        let x = &bits[..n];
        let consistent = aux.iter().zip(&bits[n..]).all(|(&(i, j), &w)| w == (x[i] && x[j]));
        let qcbo_ok = q.violation_count(x).unwrap().is_feasible();
        let values = MilpAssignment(bits.iter().map(|&b| f64::from(u8::from(b))).collect());
        let milp_ok = check_milp_feasibility(&m, &values).unwrap().is_empty();
        assert_eq!(milp_ok, consistent && qcbo_ok, "{bits:?}");
        if milp_ok {
            feasible_x += 1;
            assert_eq!(m.objective_value(&values).unwrap(), q.objective_value(x).unwrap() as f64);
        }
    }
    feasible_x
}

#[test]
fn hand_built_toy() {
    let mut q = QcboModel::new((0..8).map(|i| format!("b{i}")).collect());
    q.set_objective(LinearForm::new([(0, 1), (1, 2), (2, 3), (3, 4)]), 1).unwrap();
    q.add_linear(Family::StartAssign, LinearForm::sum(0..4), 1).unwrap();
    q.add_linear(Family::EndAssign, LinearForm::sum([4, 5]), 1).unwrap();
    q.add_quadratic(Family::Machine, LinearForm::sum([0, 1]), LinearForm::sum([4])).unwrap();
    q.add_quadratic(Family::AgvEndEnd, LinearForm::sum([2]), LinearForm::sum([5, 6])).unwrap();
    q.add_quadratic(Family::Precedence, LinearForm::sum([7]), LinearForm::sum([7, 3])).unwrap();
    assert!(check(&q) > 0);
}

#[test]
fn random_toys() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 25 {
        let n = rng.gen_range(4..=10);
        let mut q = QcboModel::new((0..n).map(|i| format!("b{i}")).collect());
        q.set_objective(LinearForm::new((0..n).map(|i| (i, rng.gen_range(0..4)))), 0).unwrap();
        let pick = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..=2);
            LinearForm::new((0..len).map(|_| (rng.gen_range(0..n), rng.gen_range(1..=2))))
        };
        for _ in 0..rng.gen_range(0..=2) {
            let f = pick(&mut rng);
            let rhs = rng.gen_range(0..=2);
            q.add_linear(Family::StartAssign, f, rhs).unwrap();
        }
        for _ in 0..rng.gen_range(1..=3) {
            let (l, r) = (pick(&mut rng), pick(&mut rng));
            q.add_quadratic(Family::AgvStartStart, l, r).unwrap();
        }
        if linearize_qcbo(&q).unwrap().vars().len() > 16 {
            continue;
        }
        check(&q);
        done += 1;
    }
}
