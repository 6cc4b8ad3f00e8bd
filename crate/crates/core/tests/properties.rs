//! Property tests for the expression layer: dual-number derivatives against
//! central finite differences, parser robustness on mutated inputs, and the
//! printer/parser fixed point.

use nullgeo::expr::Expr;
use proptest::prelude::*;

const COORDS: [&str; 3] = ["x0", "x1", "x2"];

/// Strategy producing expressions that are finite on the box [0.2, 1.8]^3
/// (divisors and sqrt arguments are kept positive by construction).
fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3.0..3.0f64).prop_map(Expr::constant),
        (0usize..3).prop_map(Expr::coord),
    ];
    leaf.prop_recursive(4, 64, 8, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| -a),
            // keep divisors and sqrt arguments strictly positive
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| a / (b.clone() * b + Expr::constant(0.5))),
            inner
                .clone()
                .prop_map(|a| (a.clone() * a + Expr::constant(0.25)).sqrt()),
            (inner, 0i32..4).prop_map(|(a, n)| a.powi(n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ad_matches_central_differences(
        e in expr_strategy(),
        px in 0.2..1.8f64,
        py in 0.2..1.8f64,
        pz in 0.2..1.8f64,
    ) {
        let p = [px, py, pz];
        let grad = match e.eval_grad(&p) {
            Ok(g) => g,
            Err(_) => return Ok(()), // outside the validity region
        };
        let h = 1e-6;
        for i in 0..3 {
            let mut pp = p;
            let mut pm = p;
            pp[i] += h;
            pm[i] -= h;
            let (fp, fm) = match (e.eval(&pp), e.eval(&pm)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let fd = (fp - fm) / (2.0 * h);
            let rel = (grad.partials[i] - fd).abs() / fd.abs().max(1.0);
            prop_assert!(rel < 1e-6, "partial {i}: ad={} fd={} for {e}", grad.partials[i], fd);
        }
    }

    #[test]
    fn printer_parser_fixed_point(e in expr_strategy()) {
        let names = COORDS.to_vec();
        let once = e.to_string();
        let parsed = Expr::parse(&once, &names).unwrap();
        let twice = parsed.to_string();
        prop_assert_eq!(&once, &twice);
        // and the reparsed tree evaluates identically
        let p = [0.7, 1.1, 0.4];
        match (e.eval(&p), parsed.eval(&p)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0)),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "eval disagreement: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn parser_never_panics_on_arbitrary_input(s in "\\PC*") {
        let _ = Expr::parse(&s, &COORDS);
    }
}

/// Deterministic fuzz sweep: ten thousand mutated variants of valid inputs
/// must parse or fail cleanly, never panic.
#[test]
fn parser_survives_mutated_corpus() {
    let seeds = [
        "sqrt(x2^2 + x1^2)",
        "x0*(x1+1) - x1^2 - x0/x2",
        "1/(4*(x2^2+x1^2))",
        "-x0^2 + 2.5e-3*x1",
        "((x0 - x1)*(x0 + x1))^3",
    ];
    let mutations = [
        "(", ")", "^", "*", "/", "+", "-", "sqrt", ".", "e", "x", "9", " ", "",
    ];
    let mut state = 0x2545f4914f6cdd1du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut count = 0;
    while count < 10_000 {
        let seed = seeds[(next() % seeds.len() as u64) as usize];
        let mut text: Vec<u8> = seed.bytes().collect();
        let edits = 1 + next() % 4;
        for _ in 0..edits {
            let m = mutations[(next() % mutations.len() as u64) as usize].as_bytes();
            let pos = (next() % (text.len() as u64 + 1)) as usize;
            match next() % 3 {
                0 => {
                    // insert
                    let mut out = text[..pos].to_vec();
                    out.extend_from_slice(m);
                    out.extend_from_slice(&text[pos..]);
                    text = out;
                }
                1 if pos < text.len() => {
                    // delete
                    text.remove(pos);
                }
                _ if pos < text.len() && !m.is_empty() => {
                    text[pos] = m[0];
                }
                _ => {}
            }
        }
        if let Ok(s) = String::from_utf8(text) {
            let _ = Expr::parse(&s, &COORDS);
            count += 1;
        }
    }
}
