//! End-to-end acceptance checks, one line per criterion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use foldrep::domination::{certify, cuff_shrink, dominating_fuchsian, strictly_dominated_fold, Verdict, WordBudget};
use foldrep::folding::{fold_surface, prescribe_labeling, Labeling};
use foldrep::moebius::{distance, HPoint, IsometryClass, Mat2, MoebiusTransform};
use foldrep::pants::{
    abelianize, boundary_lengths, build_pants_rep, classify_pants_rep, degenerate_factor, normal_form, BoundaryLengths,
    Branch, PantsClass, PantsRep,
};
use foldrep::surface::{assemble_fuchsian, euler_class_surface, half_turn, FNCoordinates, PantsDecomposition, SurfaceRep};
use foldrep::univcover::{canonical_lift, central_integer, euler_class_pants, LiftedIsometry};
use foldrep::words::{enumerate_words, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn random_conjugator(rng: &mut impl Rng) -> MoebiusTransform {
    loop {
        let (a, b, c) = (rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if let Ok(g) = MoebiusTransform::new(a, b, c, (1.0 + b * c) / a) {
            return g;
        }
    }
}

fn theta_unit(twists: Vec<f64>) -> (PantsDecomposition, FNCoordinates) {
    (PantsDecomposition::theta(), FNCoordinates::new(vec![1.0; 3], twists).unwrap())
}

fn star() -> (PantsDecomposition, FNCoordinates) {
    let lengths = vec![10.0, 10.0, 10.0, 2.0, 2.0, 2.0];
    (PantsDecomposition::star(), FNCoordinates::new(lengths, vec![0.0; 6]).unwrap())
}

fn pants_dictionary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut eulers = BTreeSet::new();
    let mut worst = 0.0f64;
    let mut samples = 0;
    while samples < 200 {
        let l = ok(BoundaryLengths::new(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0)))?;
        if degenerate_factor(&l, 1).abs() < 1e-3 {
            continue;
        }
        samples += 1;
        let mut forms = Vec::new();
        for eps in [1i8, -1] {
            let rep = ok(build_pants_rep(&l, eps, Branch::Generic))?;
            let moved = rep.conjugate(&random_conjugator(&mut rng));
            worst = worst.max(ok(boundary_lengths(&moved))?.max_diff(&l));
            let nf = ok(normal_form(&rep))?;
            ensure(ok(normal_form(&moved))?.approx_eq(&nf, 1e-8), || format!("normal form not conjugation invariant at {l:?}"))?;
            for r in [rep, rep.conjugate_mat(&Mat2::FLIP)] {
                let eu = ok(euler_class_pants(&r))?;
                ensure(eps == if eu.rem_euclid(2) == 0 { 1 } else { -1 }, || format!("ε = {eps} but eu = {eu}"))?;
                eulers.insert(eu);
            }
            forms.push(nf);
        }
        ensure(!forms[0].approx_eq(&forms[1], 1e-8), || format!("signs share a class at {l:?}"))?;
    }
    ensure(worst < 1e-8, || format!("length round trip off by {worst:e}"))?;
    ensure(eulers == BTreeSet::from([-1, 0, 1]), || format!("Euler classes {eulers:?}"))?;
    Ok(format!("200 samples, 2 classes each, eu {eulers:?}, length error {worst:.1e}"))
}

fn same_abelian(x: &PantsRep, y: &PantsRep) -> bool {
    let pair = |r: &PantsRep| {
        let ([a, _, _, d], [b, _, _, e]) = (r.alpha.entries(), r.beta.entries());
        (a / d, b / e)
    };
    let ((a, b), (c, d)) = (pair(x), pair(y));
    let close = |u: f64, v: f64| (u - v).abs() < 1e-8 * u.abs().max(1.0);
    (close(a, c) && close(b, d)) || (close(a, 1.0 / c) && close(b, 1.0 / d))
}

fn degenerate_locus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..50 {
        let (a, b) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let l = ok(BoundaryLengths::new(a, b, a + b))?;
        let reps = [
            ok(build_pants_rep(&l, -1, Branch::Generic))?,
            ok(build_pants_rep(&l, 1, Branch::Upper))?,
            ok(build_pants_rep(&l, 1, Branch::Lower))?,
            ok(build_pants_rep(&l, 1, Branch::Diagonal))?,
        ];
        let classes: Vec<PantsClass> = reps.iter().map(|r| ok(classify_pants_rep(r))).collect::<Result<_, _>>()?;
        let distinct: BTreeSet<String> = classes.iter().map(|c| c.to_string()).collect();
        ensure(distinct.len() == 4, || format!("classes {classes:?} at {l:?}"))?;
        ensure(
            classes[0] == PantsClass::Geometric && classes[3] == PantsClass::Abelian,
            || format!("classes {classes:?}"),
        )?;
        for rep in &reps[1..3] {
            let moved = rep.conjugate(&random_conjugator(&mut rng));
            let ab = ok(abelianize(&moved))?;
            ensure(ok(classify_pants_rep(&ab))? == PantsClass::Abelian, || "abelianization not abelian".into())?;
            ensure(same_abelian(&ab, &reps[3]), || format!("abelianization misses the abelian class at {l:?}"))?;
        }
    }
    Ok("50 samples, 4 classes each, abelianization lands on the abelian class".into())
}

fn euler_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let labelings: Vec<Vec<i64>> = (-1..=1)
        .flat_map(|x| (-1..=1).map(move |y| vec![x, y]))
        .filter(|l: &Vec<i64>| l.iter().sum::<i64>().abs() <= 1)
        .collect();
    let mut folds = 0;
    for _ in 0..10 {
        let twists = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (pd, fnc) = theta_unit(twists);
        let j = ok(assemble_fuchsian(&pd, &fnc))?;
        let (add, com) = (ok(euler_class_surface(&j))?, ok(j.euler_class_commutator())?);
        ensure(add == com && add.abs() == 2, || format!("Fuchsian eu {add} vs {com}"))?;
        for l in &labelings {
            let labels = ok(Labeling::new(l.clone()))?;
            let (_, rho) = ok(fold_surface(&pd, &fnc, &labels))?;
            let (add, com) = (ok(euler_class_surface(&rho))?, ok(rho.euler_class_commutator())?);
            let k = labels.sum();
            ensure(add == k && com == k, || format!("labels {l:?}: eu {add} / {com}, expected {k}"))?;
            folds += 1;
        }
    }
    Ok(format!("10 twist vectors, Fuchsian |eu| = 2, {folds} folds with eu = k"))
}

fn trigonometric_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let h = random_conjugator(&mut rng);
        let g = MoebiusTransform::translation(rng.gen_range(0.05..4.0)).conjugate_by(&h);
        let p = ok(HPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0)))?;
        let lhs = (distance(p, g.apply(p)) / 2.0).sinh();
        let rhs = (g.translation_length() / 2.0).sinh() * ok(g.axis())?.distance_to(p).cosh();
        worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    ensure(worst < 1e-8, || format!("max error {worst:e}"))?;
    Ok(format!("1000 samples, max error {worst:.1e}"))
}

fn cuff_witness(rep: &SurfaceRep, witness: &str) -> Result<bool, String> {
    let w: Word = ok(witness.parse())?;
    let target = w.canonical();
    for c in rep.presentation().cuff_words() {
        let mut power = Word::empty();
        for _ in 0..8 {
            power = power.mul(&c);
            if power.canonical() == target || power.inverse().canonical() == target {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn nonstrict_domination() -> Outcome {
    let (pd, fnc) = theta_unit(vec![0.0; 3]);
    let mut notes = Vec::new();
    for labels in [vec![1, 0], vec![1, -1]] {
        let (j, rho) = ok(fold_surface(&pd, &fnc, &ok(Labeling::new(labels.clone()))?))?;
        let cert = ok(certify(&j, &rho, 0.0, WordBudget::new(8)))?;
        let worst = cert.spectrum.records.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        ensure(worst <= 1.0 + 1e-7, || format!("{labels:?}: ratio {worst}"))?;
        ensure((cert.sup_ratio - 1.0).abs() <= 1e-7, || format!("{labels:?}: sup {}", cert.sup_ratio))?;
        ensure(cuff_witness(&j, &cert.witness)?, || format!("{labels:?}: witness {} is not a cuff", cert.witness))?;
        notes.push(format!("{labels:?} sup {:.12} at {} over {} words", cert.sup_ratio, cert.witness, cert.spectrum.records.len()));
    }
    Ok(notes.join("; "))
}

fn strict_domination_of_folds() -> Outcome {
    let t = 0.05;
    let budget = WordBudget::new(8).with_cap(50_000_000);
    let cases = [(theta_unit(vec![0.0; 3]), -1..=1), (star(), -3..=3)];
    let mut notes = Vec::new();
    for ((pd, fnc), range) in cases {
        let j = ok(assemble_fuchsian(&pd, &fnc))?;
        for k in range {
            let cert = ok(strictly_dominated_fold(&pd, &fnc, k, t, budget))?;
            let tag = format!("genus {} k = {k}", pd.genus());
            ensure(cert.verdict == Verdict::StrictlyDominated, || format!("{tag}: sup {} at {}", cert.sup_ratio, cert.witness))?;
            ensure(cert.euler_rho == k, || format!("{tag}: eu {}", cert.euler_rho))?;
            let (_, rho) = ok(fold_surface(&pd, &ok(cuff_shrink(&fnc, t))?, &ok(prescribe_labeling(&pd, k))?))?;
            for c in 0..pd.cuff_count() {
                let ratio = ok(rho.cuff_holonomy(c))?.translation_length() / ok(j.cuff_holonomy(c))?.translation_length();
                ensure((ratio - (1.0 - t)).abs() < 1e-9, || format!("{tag}: cuff {c} ratio {ratio}"))?;
            }
            notes.push(format!("g{}k{k} {:.4}", pd.genus(), cert.sup_ratio));
        }
    }
    Ok(format!("all StrictlyDominated, cuff ratios 0.95; sup {}", notes.join(" ")))
}

fn strict_domination_of_fuchsian() -> Outcome {
    let (pd, fnc) = theta_unit(vec![0.0; 3]);
    let labels = ok(Labeling::new(vec![1, 0]))?;
    let strict = ok(dominating_fuchsian(&pd, &fnc, &labels, 0.05, WordBudget::new(8)))?;
    ensure(strict.verdict == Verdict::StrictlyDominated, || format!("t = 0.05: sup {}", strict.sup_ratio))?;
    let flat = ok(dominating_fuchsian(&pd, &fnc, &labels, 0.0, WordBudget::new(8)))?;
    ensure(flat.verdict == Verdict::NotCertified, || "t = 0 certified".into())?;
    let w = flat.spectrum.witness().ok_or("no witness")?;
    ensure((w.ratio - 1.0).abs() <= 1e-7, || format!("t = 0 witness ratio {}", w.ratio))?;
    Ok(format!(
        "t = 0.05 sup {:.5}; t = 0 NotCertified, witness {} ratio {:.12}",
        strict.sup_ratio, flat.witness, w.ratio
    ))
}

fn fuchsian_hyperbolicity() -> Outcome {
    let mut notes = Vec::new();
    let reps = [
        theta_unit(vec![0.3, -0.7, 1.1]),
        (PantsDecomposition::tetrahedron(), FNCoordinates::uniform(6, 1.5).unwrap()),
    ];
    for (pd, fnc) in reps {
        let rep = ok(assemble_fuchsian(&pd, &fnc))?;
        let words = ok(enumerate_words(rep.generators().len(), 6))?;
        let mut bad = 0;
        for w in words.iter() {
            if ok(rep.evaluate_letters(w))?.classify() != IsometryClass::Hyperbolic {
                bad += 1;
            }
        }
        ensure(bad == 0, || format!("genus {}: {bad} non-hyperbolic words", pd.genus()))?;
        notes.push(format!("genus {}: {} words", pd.genus(), words.len()));
    }
    Ok(format!("{}, zero exceptions", notes.join(", ")))
}

fn universal_cover_sanity() -> Outcome {
    let h = LiftedIsometry::new(half_turn());
    let k = ok(central_integer(&h.compose(&h)))?;
    ensure(k == 1, || format!("half-turn squared is central {k}"))?;
    let (pd, fnc) = theta_unit(vec![0.4, 0.0, -0.9]);
    let rep = ok(assemble_fuchsian(&pd, &fnc))?;
    let lifts: Vec<LiftedIsometry> = ok(rep.standard_images())?.iter().map(|g| ok(canonical_lift(g))).collect::<Result<_, _>>()?;
    let base = ok(rep.euler_class_commutator_lifted(&lifts))?;
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..20 {
        let moved: Vec<LiftedIsometry> = lifts.iter().map(|l| l.deck(rng.gen_range(-5..=5))).collect();
        let eu = ok(rep.euler_class_commutator_lifted(&moved))?;
        ensure(eu == base, || format!("perturbed lifts give {eu}, expected {base}"))?;
    }
    Ok(format!("half-turn squared = 1, eu = {base} under 20 deck perturbations"))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("pants dictionary", pants_dictionary, Duration::from_secs(5)),
        ("degenerate locus", degenerate_locus, Duration::from_secs(5)),
        ("Euler class cross-check", euler_cross_check, Duration::from_secs(30)),
        ("displacement identity", trigonometric_identity, Duration::from_secs(1)),
        ("non-strict domination of folds", nonstrict_domination, Duration::from_secs(60)),
        ("strict domination of shrunk folds", strict_domination_of_folds, Duration::from_secs(300)),
        ("strict domination by lengthened Fuchsian", strict_domination_of_fuchsian, Duration::from_secs(120)),
        ("Fuchsian hyperbolicity probe", fuchsian_hyperbolicity, Duration::from_secs(30)),
        ("universal cover sanity", universal_cover_sanity, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the time limit")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {}: {status} {name} [{:.2}s / {}s] {detail}",
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
