use canvar::dsl::{parse, BinOp, Expr, Func};
use proptest::prelude::*;
use rand::Rng;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Random expressions built from smooth pieces on the sampling box, so every
/// derivative exists where it is evaluated.
fn smooth(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) {
            Expr::var(rng.gen_range(0..3))
        } else {
            Expr::num((rng.gen_range(-20..=20) as f64) / 8.0)
        };
    }
    let a = smooth(rng, depth - 1);
    match rng.gen_range(0..7) {
        0 => a + smooth(rng, depth - 1),
        1 => a - smooth(rng, depth - 1),
        2 => a * smooth(rng, depth - 1),
        3 => a / (Expr::num(2.0) + Expr::call(Func::Cos, smooth(rng, depth - 1))),
        4 => Expr::call([Func::Sin, Func::Cos, Func::Exp, Func::Cosh, Func::Sinh][rng.gen_range(0..5)], a),
        5 => Expr::call(Func::Sqrt, Expr::num(1.5) + Expr::call(Func::Sin, a)),
        _ => Expr::Bin(BinOp::Pow, Box::new(a), Box::new(Expr::num(rng.gen_range(2..4) as f64))),
    }
}

#[test]
fn derivatives_match_central_differences() {
    let mut rng = canvar::numerics::seeded_rng(50);
    let mut checked = 0;
    while checked < 50 {
        let e = smooth(&mut rng, 4);
        let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let Ok(v) = e.eval(&p) else { continue };
        if !v.is_finite() || v.abs() > 1e4 {
            continue;
        }
        for i in 0..3 {
            let exact = e.diff(i).eval(&p).unwrap();
            let h = 1e-5;
            let (mut a, mut b) = (p.clone(), p.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h);
            // constants carry no partials
            let dual = e.eval_dual(&p, &[]).unwrap().partials.get(i).copied().unwrap_or(0.0);
            assert!((exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()), "{e}: d/d{} {exact} vs {fd}", VARS[i]);
            assert!((exact - dual).abs() <= 1e-10 * (1.0 + exact.abs()), "{e}");
        }
        checked += 1;
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Expr::var),
        (-1e3f64..1e3).prop_map(|v| Expr::num(v.abs())),
        Just(Expr::num(0.1)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| -e),
            (0usize..9, inner.clone()).prop_map(|(f, e)| Expr::call(Func::ALL[f], e)),
            (0usize..5, inner.clone(), inner).prop_map(|(o, a, b)| {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][o];
                Expr::Bin(op, Box::new(a), Box::new(b))
            }),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in arb_expr()) {
        let src = e.to_source(&VARS);
        let back = parse(&src, &VARS).unwrap();
        prop_assert_eq!(back, e, "{}", src);
    }
}
