//! End-to-end checks of the shipped operator systems against the model
//! series: annihilation, substitution equivalence, solution ranks, and
//! monodromy classification.

use transition_dmod::logseries::{
    build_series, continued_x_series, expand_components, model, Component, Family, LogSeries,
    ModelName,
};
use transition_dmod::pfops::{
    classify_monodromy, independence_rank, load_system, monodromy_filtration, parse_operator,
    substitute_variables, verify_annihilation, DiffOperator, MonodromyKind, OperatorSystem,
    PfError, VarMap,
};

fn series(name: ModelName, order: u32) -> LogSeries {
    build_series(&model(name), order).unwrap()
}

fn assert_annihilated(sys: &OperatorSystem, s: &LogSeries, label: &str, order: u32) {
    let report = verify_annihilation(sys, s, order).unwrap();
    for check in &report.checks {
        assert!(
            check.passed,
            "{label}: operator {} leaves residue at {:?}: {}",
            check.operator,
            check.witness.as_ref().unwrap().0,
            check.witness.as_ref().unwrap().1,
        );
    }
}

#[test]
fn local_systems_annihilate_local_series() {
    let sys_x = load_system("local_x").unwrap();
    let sys_y = load_system("local_y").unwrap();
    assert_annihilated(&sys_x, &series(ModelName::LocalX, 8), "local_X", 6);
    assert_annihilated(&sys_y, &series(ModelName::LocalYbar, 8), "local_Ybar", 6);
    assert_annihilated(&sys_y, &series(ModelName::LocalI5, 8), "local_I5", 6);
    assert_annihilated(&sys_y, &series(ModelName::LocalI6, 8), "local_I6", 6);
}

#[test]
fn global_systems_annihilate_global_series() {
    let sys_x = load_system("global_x").unwrap();
    let sys_y = load_system("global_y").unwrap();
    assert_annihilated(&sys_x, &series(ModelName::GlobalX, 8), "global_X", 6);
    assert_annihilated(&sys_y, &series(ModelName::GlobalYbar, 8), "global_Ybar", 6);
    assert_annihilated(&sys_y, &series(ModelName::GlobalI5, 8), "global_I5", 6);
    assert_annihilated(&sys_y, &series(ModelName::GlobalI6, 8), "global_I6", 6);
}

#[test]
fn continued_series_satisfy_the_same_systems() {
    let sys_local = load_system("local_y").unwrap();
    let sys_global = load_system("global_y").unwrap();
    let local = continued_x_series(Family::Local, 8).unwrap();
    let global = continued_x_series(Family::Global, 8).unwrap();
    assert_annihilated(&sys_local, &local, "continued local", 6);
    assert_annihilated(&sys_global, &global, "continued global", 6);
}

#[test]
fn cross_family_checks_fail_with_witness() {
    // The local systems do not annihilate the global series, and the
    // report points at a concrete offending coefficient.
    let sys_x = load_system("local_x").unwrap();
    let report = verify_annihilation(&sys_x, &series(ModelName::GlobalX, 6), 4).unwrap();
    assert!(!report.passed());
    let bad = report.checks.iter().find(|c| !c.passed).unwrap();
    assert!(bad.witness.is_some());

    let sys_y = load_system("local_y").unwrap();
    let report = verify_annihilation(&sys_y, &series(ModelName::GlobalYbar, 6), 4).unwrap();
    assert!(!report.passed());
}

#[test]
fn insufficient_truncation_is_reported() {
    let sys_y = load_system("local_y").unwrap();
    // delta2 shifts by x*y, so checking order 4 needs series order 6.
    let err = verify_annihilation(&sys_y, &series(ModelName::LocalYbar, 4), 4);
    assert!(matches!(err, Err(PfError::OrderTooLow { .. })));
}

fn standard_map() -> VarMap {
    let from = vec!["x".to_string(), "y".to_string()];
    let to = vec!["q1".to_string(), "q2".to_string()];
    VarMap::new(from, to, vec![vec![-1, 0], vec![1, 1]]).unwrap()
}

#[test]
fn substitution_carries_one_system_to_the_other() {
    // Under x -> q1^-1, y -> q1 q2 the extension-side operators become
    // the resolution-side ones, up to a left unit monomial on the first.
    let map = standard_map();
    for (y_name, x_name) in [("local_y", "local_x"), ("global_y", "global_x")] {
        let sys_y = load_system(y_name).unwrap();
        let sys_x = load_system(x_name).unwrap();
        let q1 = DiffOperator::var(&sys_x.vars, "q1");

        let image = substitute_variables(sys_y.operator("delta1").unwrap(), &map).unwrap();
        let lifted = &q1 * &image;
        assert_eq!(&lifted, sys_x.operator("delta1").unwrap(), "{y_name} delta1");

        let image = substitute_variables(sys_y.operator("delta2").unwrap(), &map).unwrap();
        assert_eq!(&image, sys_x.operator("delta2").unwrap(), "{y_name} delta2");

        if let (Some(p0y), Some(p0x)) = (sys_y.operator("p0"), sys_x.operator("p0")) {
            let image = substitute_variables(p0y, &map).unwrap();
            assert_eq!(&image, p0x, "{y_name} p0");
        }
    }
}

#[test]
fn miscopied_global_operators_fail_annihilation() {
    // Two near-miss variants of the global extension-side operators:
    // a doubled second z step in the triple product of the order-four
    // operator, and a plain second derivative in place of the squared
    // difference in the last term of the order-three operator. Both
    // leave residues, so the shipped forms are pinned by these checks.
    let vars = vec!["x".to_string(), "y".to_string()];
    let ybar = series(ModelName::GlobalYbar, 8);

    let doubled = parse_operator(
        "x*(D2 - D1)^4 - (5*D2 - 3*D1 + 3*z)*(5*D2 - 3*D1 + 2*z)*(5*D2 - 3*D1 + z + z)*D1",
        &vars,
    )
    .unwrap();
    let sys = OperatorSystem {
        name: "doubled_step".to_string(),
        vars: vars.clone(),
        operators: vec![("delta1".to_string(), doubled)],
        expected_rank: 6,
    };
    let report = verify_annihilation(&sys, &ybar, 6).unwrap();
    assert!(!report.passed());

    let plain = parse_operator(
        "-5*(D2 - D1)^3 + 2*(D2 - D1)^2*D2 + 15*x^-1*D1*(5*D2 - 3*D1 + z)*(5*D2 - 3*D1 + 2*z) - 4*x*y*D2^2*(5*D2 - 3*D1 + z)",
        &vars,
    )
    .unwrap();
    let sys = OperatorSystem {
        name: "plain_second_derivative".to_string(),
        vars: vars.clone(),
        operators: vec![("p0".to_string(), plain)],
        expected_rank: 6,
    };
    for name in [ModelName::GlobalYbar, ModelName::GlobalI5, ModelName::GlobalI6] {
        let report = verify_annihilation(&sys, &series(name, 8), 6).unwrap();
        assert!(!report.passed(), "variant unexpectedly annihilates {name}");
    }
}

fn extension_basis(family: Family, order: u32) -> Vec<Component> {
    let (ybar, i5, i6) = match family {
        Family::Local => (ModelName::LocalYbar, ModelName::LocalI5, ModelName::LocalI6),
        Family::Global => (
            ModelName::GlobalYbar,
            ModelName::GlobalI5,
            ModelName::GlobalI6,
        ),
    };
    let mut basis = expand_components(&series(ybar, order));
    basis.extend(expand_components(&series(i5, order)));
    basis.extend(expand_components(&series(i6, order)));
    basis
}

#[test]
fn solution_ranks_match_the_expected_dimension() {
    let comps_local_x = expand_components(&series(ModelName::LocalX, 5));
    assert_eq!(comps_local_x.len(), 6);
    assert_eq!(independence_rank(&comps_local_x), 6);

    // The global resolution series spreads over seven basis monomials,
    // but they only span a six-dimensional space of functions.
    let comps_global_x = expand_components(&series(ModelName::GlobalX, 5));
    assert_eq!(comps_global_x.len(), 7);
    assert_eq!(independence_rank(&comps_global_x), 6);

    for family in [Family::Local, Family::Global] {
        let basis = extension_basis(family, 5);
        assert_eq!(basis.len(), 6);
        assert_eq!(independence_rank(&basis), 6, "{family}");
    }

    // A repeated component adds nothing.
    let one = expand_components(&series(ModelName::LocalI5, 5));
    assert_eq!(one.len(), 1);
    let doubled = vec![one[0].clone(), one[0].clone()];
    assert_eq!(independence_rank(&doubled), 1);
}

#[test]
fn extension_components_classify_as_expected() {
    let ybar = expand_components(&series(ModelName::LocalYbar, 5));
    for c in &ybar {
        let cl = classify_monodromy(c, "x").unwrap();
        assert_eq!(cl.kind, MonodromyKind::Trivial, "{} in x", c.monomial);
    }
    let p1 = ybar.iter().find(|c| c.monomial == "p").unwrap();
    assert_eq!(
        classify_monodromy(p1, "y").unwrap().kind,
        MonodromyKind::Trivial
    );
    let p2 = ybar.iter().find(|c| c.monomial == "p^2").unwrap();
    let cl = classify_monodromy(p2, "y").unwrap();
    assert_eq!(cl.kind, MonodromyKind::Unipotent);
    assert!(cl.max_log_power >= 1);

    let i5 = expand_components(&series(ModelName::LocalI5, 5));
    let cl = classify_monodromy(&i5[0], "x").unwrap();
    assert_eq!(cl.kind, MonodromyKind::FiniteOrder(3));
    assert_eq!(
        classify_monodromy(&i5[0], "y").unwrap().kind,
        MonodromyKind::Trivial
    );
}

#[test]
fn filtration_dimensions() {
    for family in [Family::Local, Family::Global] {
        let basis = extension_basis(family, 5);
        let (triv_x, quot_x) = monodromy_filtration(&basis, "x", 6).unwrap();
        assert_eq!((triv_x, quot_x), (4, 2), "{family} around x");
        let (triv_y, quot_y) = monodromy_filtration(&basis, "y", 6).unwrap();
        assert_eq!((triv_y, quot_y), (3, 3), "{family} around y");
    }

    let short = extension_basis(Family::Local, 5)[..5].to_vec();
    assert!(matches!(
        monodromy_filtration(&short, "x", 6),
        Err(PfError::NotABasis { .. })
    ));
}
