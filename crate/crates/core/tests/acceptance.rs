//! Acceptance suite: one [PASS]/[FAIL] line per criterion; exits nonzero if any criterion fails.

use std::time::Instant;

use serde_json::{json, Value};

use operadkit::families::{family_identities_check, family_series, make_family, mas_coefficient, BSource, FamilyKind, FamilySpec};
use operadkit::functors::{functor_g_atr, functor_g_str, hilbert_shift_holds, image_series, operad_roundtrip, roundtrip_check, Direction};
use operadkit::graded_algebra::{self, build_bc, saturation_condition_check, AlgElement, BcType, CyclicAlgebra, DenseAlgebra, MultiplicationWitness};
use operadkit::operad::{check_axioms, prime_at_horizon, Operad, PrimeVerdict, DEFAULT_PRIME_DIM_CAP};
use operadkit::scalars::{prime_power_descriptor, Field};
use operadkit::series::{classify_growth, GrowthClass, HilbertSeries};
use operadkit::worked_examples::{
    field_tower_series, lambda_certificate, lambda_of, multiplicity_example, nested_repeat_pipeline, squarefree_pipeline, CertificateMethod,
    FieldTowerConfig, NestedRepeatConfig,
};

struct Outcome {
    passed: bool,
    detail: String,
    report: Value,
}

fn outcome(passed: bool, detail: impl Into<String>, report: Value) -> Outcome {
    Outcome { passed, detail: detail.into(), report }
}

fn q() -> Field {
    Field::rationals()
}

fn fam(kind: FamilyKind, field: &Field, h: usize) -> Operad {
    make_family(&FamilySpec::new(kind, field, h)).expect("family builds")
}

fn nilpotent_even() -> Vec<BSource> {
    vec![BSource::SquareZero { b: 1 }, BSource::Truncated { b: 2 }, BSource::SquareZero { b: 3 }]
}

fn nilpotent_odd() -> Vec<BSource> {
    vec![BSource::SquareZero { b: 1 }, BSource::SquareZero { b: 3 }, BSource::ExteriorType]
}

fn suite_families() -> Vec<FamilyKind> {
    let mut out = vec![
        FamilyKind::Com,
        FamilyKind::Ope,
        FamilyKind::Mas,
        FamilyKind::ComW { w: 2 },
        FamilyKind::ComW { w: 3 },
        FamilyKind::OpeW { w: 4 },
    ];
    out.extend(nilpotent_even().into_iter().map(|b| FamilyKind::LinE { b }));
    out.extend(nilpotent_odd().into_iter().map(|b| FamilyKind::LinO { b }));
    out
}

fn axiom_suite() -> Outcome {
    let h = 7;
    let field = q();
    let ops: Vec<Operad> = suite_families().into_iter().map(|k| fam(k, &field, h)).collect();
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in &ops {
        checked += 1;
        if !check_axioms(p, h).passed {
            failures.push(p.name().to_string());
        }
    }
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let s = ops[a].direct_sum(&ops[b]).expect("same field");
            checked += 1;
            if !check_axioms(&s, h).passed {
                failures.push(s.name().to_string());
            }
        }
    }
    let f3 = Field::prime(3).unwrap();
    let f9 = Field::new(&prime_power_descriptor(9).unwrap()).unwrap();
    let bc = fam(FamilyKind::Mas, &f3, h).base_change(&f9).expect("prime base");
    checked += 1;
    if !check_axioms(&bc, h).passed {
        failures.push(bc.name().to_string());
    }
    // μ_3 ∘_2 μ_2 = -μ_4 in Mas; flip it
    let mas = fam(FamilyKind::Mas, &field, h);
    let mutated = mas.with_composition((3, 0, 2, 2, 0), vec![field.one()]).unwrap();
    let rep = check_axioms(&mutated, h);
    let witness = rep.violations.first().map(|v| format!("{:?} at arities {:?}, slots {:?}: {}", v.axiom, v.arities, v.slots, v.detail));
    let passed = failures.is_empty() && !rep.passed && witness.is_some();
    outcome(
        passed,
        format!("{checked} operads clean, mutated Mas caught: {}", witness.clone().unwrap_or_else(|| "no witness".into())),
        json!({ "checked": checked, "failures": failures, "mutated_witness": witness }),
    )
}

fn identities() -> Outcome {
    let rep = family_identities_check(13);
    let bad: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    outcome(rep.passed, format!("{} comparisons at horizon 13, {} mismatches", rep.checks.len(), bad.len()), serde_json::to_value(&rep).unwrap())
}

fn functor_identity() -> Outcome {
    let field = q();
    let mut bad = Vec::new();
    let mut kinds = suite_families();
    kinds.push(FamilyKind::LinE { b: BSource::Trivial });
    for k in &kinds {
        let p = fam(k.clone(), &field, 20);
        if !hilbert_shift_holds(&p) {
            bad.push(p.name().to_string());
        }
    }
    let f2 = Field::prime(2).unwrap();
    let mas_source = build_bc(&CyclicAlgebra::square_zero(&field, 1), BcType::Odd, 12).unwrap();
    let trips = [
        ("Q[t]", roundtrip_check(&DenseAlgebra::polynomial(&field, 1, 12), Direction::Str).unwrap().passed),
        ("F2[t]", roundtrip_check(&DenseAlgebra::polynomial(&f2, 1, 12), Direction::Str).unwrap().passed),
        ("Mas source", roundtrip_check(&mas_source, Direction::Atr).unwrap().passed),
        ("G(F(Mas))", operad_roundtrip(&fam(FamilyKind::Mas, &field, 10), Direction::Atr).unwrap().is_none()),
        ("G(F(Com))", operad_roundtrip(&fam(FamilyKind::Com, &field, 10), Direction::Str).unwrap().is_none()),
    ];
    let failed_trips: Vec<&str> = trips.iter().filter(|t| !t.1).map(|t| t.0).collect();
    outcome(
        bad.is_empty() && failed_trips.is_empty(),
        format!("H_P = t·H_A for {} families at horizon 20; {} round trips", kinds.len() - bad.len(), trips.len() - failed_trips.len()),
        json!({ "shift_failures": bad, "roundtrip_failures": failed_trips }),
    )
}

fn mas_identification() -> Outcome {
    let field = q();
    let a = build_bc(&CyclicAlgebra::square_zero(&field, 1), BcType::Odd, 10).unwrap();
    let p = functor_g_atr(&a).unwrap();
    let mut checked = 0;
    let mut signed = 0;
    let mut bad = Vec::new();
    for n in 1..=11usize {
        for m in 1..=11usize {
            if n + m - 1 > 11 {
                continue;
            }
            for i in 1..=n {
                let got = p.compose_basis(n, 0, i, m, 0);
                let want = mas_coefficient(n, i, m);
                checked += 1;
                if want == -1 {
                    signed += 1;
                }
                if got != vec![field.from_i64(want)] {
                    bad.push(format!("μ_{n} ∘_{i} μ_{m}"));
                }
            }
        }
    }
    let table_match = p.structural_mismatch(&fam(FamilyKind::Mas, &field, 11));
    outcome(
        bad.is_empty() && table_match.is_none() && signed > 0,
        format!("{checked} compositions up to arity 11 ({signed} with coefficient −1)"),
        json!({ "checked": checked, "negative": signed, "mismatches": bad, "structural": table_match }),
    )
}

fn multiplicity_check() -> Outcome {
    let r = multiplicity_example(40).unwrap();
    outcome(
        r.passed,
        format!("m(P) = {:?}, m(Q) = {:?}, m(P⊕Q) = {:?}; Com_F: {:?}", r.m_p, r.m_q, r.m_sum, r.com_f.iter().map(|c| (&c.extension_degree, &c.multiplicity)).collect::<Vec<_>>()),
        serde_json::to_value(&r).unwrap(),
    )
}

fn primeness() -> Outcome {
    let field = q();
    let mas = prime_at_horizon(&fam(FamilyKind::Mas, &field, 10), 10, DEFAULT_PRIME_DIM_CAP);
    let mas_ok = matches!(&mas, PrimeVerdict::Witness { left_generator, right_generator, .. } if left_generator == "mu_2" && right_generator == "mu_2");
    let com = prime_at_horizon(&fam(FamilyKind::Com, &field, 12), 12, DEFAULT_PRIME_DIM_CAP);
    let ope = prime_at_horizon(&fam(FamilyKind::Ope, &field, 12), 12, DEFAULT_PRIME_DIM_CAP);
    let c = fam(FamilyKind::Com, &field, 8);
    let sum = c.direct_sum(&c).unwrap();
    let cross = prime_at_horizon(&sum, 8, DEFAULT_PRIME_DIM_CAP);
    let cross_ok = cross.has_witness();
    let no_violation = |v: &PrimeVerdict| matches!(v, PrimeVerdict::NoViolationFound { .. });
    outcome(
        mas_ok && no_violation(&com) && no_violation(&ope) && cross_ok,
        "Mas: (μ_2)∘(μ_2) = 0; Com, Ope: no violation at 12; Com⊕Com: cross-summand pair",
        json!({ "mas": mas, "com": com, "ope": ope, "com_plus_com": cross }),
    )
}

fn saturation() -> Outcome {
    let field = q();
    let poly = DenseAlgebra::polynomial(&field, 1, 64);
    let alphas: Vec<AlgElement> = (1..=34).map(|s| graded_algebra::basis_element(&poly, s, 0)).collect();
    let poly_ok = (0..=30).all(|d| saturation_condition_check(&poly, &alphas, d).unwrap().passed);
    let sq = squarefree_pipeline(64).unwrap();
    let sq_ok = sq.saturation_thresholds.iter().all(Option::is_some) && sq.saturation_max_d == 31 && sq.quotients.iter().all(|r| r.saturation_passed);
    let bc = build_bc(&CyclicAlgebra::square_zero(&field, 1), BcType::Odd, 40).unwrap();
    let cs: Vec<AlgElement> = (1..=20).map(|s| graded_algebra::basis_element(&bc, 2 * s, 0)).collect();
    let bc_ok = (0..=12).all(|d| saturation_condition_check(&bc, &cs, d).unwrap().passed);
    let dual = DenseAlgebra::dual_numbers(&field, 1, 6);
    let x = graded_algebra::basis_element(&dual, 1, 0);
    let rep = saturation_condition_check(&dual, &[x], 1).unwrap();
    let kernel = rep.outcomes.iter().find_map(|o| match &o.witness {
        Some(MultiplicationWitness::Kernel { degree, element }) => Some(format!("{element} (degree {degree})")),
        _ => None,
    });
    let dual_ok = !rep.passed && kernel.is_some();
    outcome(
        poly_ok && sq_ok && bc_ok && dual_ok,
        format!("Q[t] d ≤ 30, squarefree d ≤ 31, B{{c}} d ≤ 12; k ⊕ kx kernel {}", kernel.clone().unwrap_or_default()),
        json!({ "polynomial": poly_ok, "squarefree": sq_ok, "thresholds": sq.saturation_thresholds, "bc": bc_ok, "dual_kernel": kernel }),
    )
}

fn field_tower() -> Outcome {
    let certs: Vec<_> = (1..=64).map(|m| lambda_certificate(m).unwrap()).collect();
    let monotone = (1..=64u64).map(|m| lambda_of(m).unwrap()).collect::<Vec<_>>().windows(2).all(|w| w[0] <= w[1]);
    let r = field_tower_series(&FieldTowerConfig::binary(4, 10_000).unwrap()).unwrap();
    let gk = r.gk.value();
    let passed = monotone && r.sum_bound.passed && r.per_degree_bound && (0.9..=1.05).contains(&gk);
    outcome(
        passed,
        format!("λ(1..64) certified (λ(64) = {}); partial-sum bound to 10^4 {}; GK ≈ {gk:.4}", certs[63].lambda, if r.sum_bound.passed { "holds" } else { "fails" }),
        json!({ "lambdas": certs.iter().map(|c| &c.lambda).collect::<Vec<_>>(), "sum_bound": r.sum_bound.passed, "gk": gk, "windows": r.windows }),
    )
}

fn nested_repeat() -> Outcome {
    let c = nested_repeat_pipeline(&NestedRepeatConfig::custom(vec![1, 5, 40])).unwrap();
    let s1 = &c.stages[0];
    let custom_ok = c.passed
        && s1.alpha == "2"
        && s1.beta == "1"
        && s1.window.as_ref().is_some_and(|w| w.dims == ["1", "2", "1"])
        && c.stages.iter().skip(1).all(|s| s.beta_recurrence == Some(true))
        && c.s_a_consistent == Some(true);
    let e = nested_repeat_pipeline(&NestedRepeatConfig::exponential(3)).unwrap();
    let certs: Vec<_> = e.stages.iter().filter_map(|s| s.schedule_certificate.as_ref()).collect();
    let exp_ok = e.passed && certs.len() == 3 && certs.iter().all(|c| c.holds) && certs[0].method == CertificateMethod::Interval;
    outcome(
        custom_ok && exp_ok,
        format!(
            "custom (1,5,40): α = ({}), β = ({}); exponential: d_2 = {}, {} certificates",
            c.stages.iter().map(|s| s.alpha.as_str()).collect::<Vec<_>>().join(","),
            c.stages.iter().map(|s| s.beta.as_str()).collect::<Vec<_>>().join(","),
            e.stages[1].d,
            certs.len()
        ),
        json!({ "custom": c.stages, "exponential": e.stages }),
    )
}

fn squarefree() -> Outcome {
    let r = squarefree_pipeline(512).unwrap();
    outcome(
        r.passed,
        format!("dims 1 to 512, cancellation sharp for l ≤ {}, image GK ≈ {:.4}, H = {}", r.cancellation.len() - 1, r.image_gk.value(), r.image_rational.clone().unwrap_or_default()),
        json!({ "cancellation": r.cancellation, "gk": r.image_gk.value(), "rational": r.image_rational, "quotients": r.quotients }),
    )
}

fn growth() -> Outcome {
    let ones = classify_growth(&HilbertSeries::from_fn(1000, |n| u64::from(n >= 1))).unwrap();
    let linear = classify_growth(&HilbertSeries::from_fn(1000, |n| n as u64)).unwrap();
    let ones_ok = ones.class == GrowthClass::Linear;
    let lin_ok = linear.class == GrowthClass::Polynomial { degree: 2 };
    let field = q();
    let mut series: Vec<(String, HilbertSeries)> = suite_families().iter().map(|k| (format!("{k:?}"), family_series(k, 1000))).collect();
    let singles = series.len();
    for a in 0..singles {
        for b in a + 1..singles {
            series.push((format!("{} ⊕ {}", series[a].0, series[b].0), series[a].1.add(&series[b].1)));
        }
    }
    let sq = operadkit::graded_algebra::NormalWordAlgebra::binary_squarefree(&field, 999);
    series.push(("G_Str(squarefree)".into(), image_series(&sq)));
    let p = functor_g_str(&DenseAlgebra::polynomial(&field, 1, 120)).unwrap();
    series.push(("G_Str(Q[t])".into(), p.hilbert_series()));
    let gaps: Vec<String> = series.iter().filter(|(_, h)| classify_growth(h).unwrap().gap_flag).map(|(n, _)| n.clone()).collect();
    outcome(
        ones_ok && lin_ok && gaps.is_empty(),
        format!("ones → {:?}, n → {:?}, {} family profiles outside (1,2)", ones.class, linear.class, series.len() - gaps.len()),
        json!({ "ones": ones.class, "linear": linear.class, "profiles": series.len(), "gaps": gaps }),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    ("axiom suite", axiom_suite),
    ("family identities", identities),
    ("functor identity and round trips", functor_identity),
    ("Mas identification", mas_identification),
    ("multiplicity of direct sums", multiplicity_check),
    ("primeness witnesses", primeness),
    ("saturation condition", saturation),
    ("field-tower algebra", field_tower),
    ("nested-repeat algebra", nested_repeat),
    ("binary squarefree algebra", squarefree),
    ("growth classifier", growth),
];

fn main() {
    let mut all = true;
    let mut first = Vec::new();
    for (k, (name, f)) in CRITERIA.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let mut passed = o.passed;
        let mut detail = o.detail;
        if k == 0 && secs >= 60.0 {
            passed = false;
            detail.push_str(" — over the 60 s budget");
        }
        println!("[{}] {:>2}. {name}: {detail} ({secs:.1}s)", if passed { "PASS" } else { "FAIL" }, k + 1);
        all &= passed;
        first.push(json!({ "criterion": name, "passed": o.passed, "report": o.report }));
    }
    let first_text = serde_json::to_string_pretty(&first).unwrap();
    let t = Instant::now();
    let second: Vec<Value> = CRITERIA.iter().map(|(name, f)| {
        let o = f();
        json!({ "criterion": name, "passed": o.passed, "report": o.report })
    }).collect();
    let second_text = serde_json::to_string_pretty(&second).unwrap();
    let same = first_text == second_text;
    println!(
        "[{}] 12. determinism: two full runs {} ({} bytes) ({:.1}s)",
        if same { "PASS" } else { "FAIL" },
        if same { "byte-identical" } else { "differ" },
        first_text.len(),
        t.elapsed().as_secs_f64()
    );
    all &= same;
    if !all {
        std::process::exit(1);
    }
}
