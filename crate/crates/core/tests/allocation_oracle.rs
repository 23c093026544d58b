mod common;

#[test]
fn allocator_never_deadlocks_when_a_feasible_assignment_exists() {
    let (feasible, infeasible, violations) = common::oracle_equivalence(500);
    println!("feasible={feasible} infeasible={infeasible}");
    assert!(violations.is_empty(), "deadlocked on feasible seeds {violations:?}");
    // The generator must exercise both outcomes.
    assert!(feasible > 50, "only {feasible} feasible instances");
    assert!(infeasible > 10, "only {infeasible} infeasible instances");
}
