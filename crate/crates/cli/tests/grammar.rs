use proptest::prelude::*;
use twistcalc_cli::expr::{parse_expr, BinOp, Expr, Symbol, Symbols};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u64..1000).prop_map(|n| Expr::Int(n.to_string())),
        "[1-9][0-9]{10,25}".prop_map(Expr::Int),
        Just(Expr::Sym(Symbol::X)),
        Just(Expr::Sym(Symbol::Q)),
    ]
}

fn binop() -> impl Strategy<Value = BinOp> {
    prop_oneof![
        Just(BinOp::Add),
        Just(BinOp::Sub),
        Just(BinOp::Mul),
        Just(BinOp::Div)
    ]
}

fn scalar_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (binop(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::Bin(
                op,
                Box::new(l),
                Box::new(r)
            )),
            (inner, 0u32..12).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
        ]
    })
}

fn any_expr() -> impl Strategy<Value = Expr> {
    let matrix = (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(scalar_expr(), c), r).prop_map(Expr::Matrix)
    });
    prop_oneof![
        4 => scalar_expr(),
        1 => matrix.clone(),
        1 => (binop(), matrix.clone(), matrix).prop_map(|(op, l, r)| Expr::Bin(op, Box::new(l), Box::new(r))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(e in any_expr()) {
        let text = e.to_string();
        let back = parse_expr(&text, Symbols::ALL);
        prop_assert_eq!(back.as_ref(), Ok(&e), "printed as {}", text);
    }

    #[test]
    fn whitespace_is_insignificant(e in scalar_expr()) {
        let spaced: String = e.to_string().chars().flat_map(|c| [c, ' ']).collect();
        // Splitting a multi-digit integer changes the token stream, so only
        // compare when no digits are adjacent.
        let digits_adjacent = e.to_string().as_bytes().windows(2).any(|w| w[0].is_ascii_digit() && w[1].is_ascii_digit());
        if !digits_adjacent {
            prop_assert_eq!(parse_expr(&spaced, Symbols::ALL), Ok(e));
        }
    }
}

#[test]
fn precedence_table() {
    let cases = [
        ("-x^2", "-x^2"),
        ("(-x)^2", "(-x)^2"),
        ("1-2-3", "1-2-3"),
        ("1-(2-3)", "1-(2-3)"),
        ("2*x/3*q", "2*x/3*q"),
        ("2*(x/3)", "2*(x/3)"),
        ("-(1+x)*q", "-(1+x)*q"),
        ("(((x)))", "x"),
    ];
    for (src, printed) in cases {
        assert_eq!(
            parse_expr(src, Symbols::ALL).unwrap().to_string(),
            printed,
            "{src}"
        );
    }
    // Unary minus binds tighter than multiplication.
    let e = parse_expr("-x*q", Symbols::ALL).unwrap();
    assert!(matches!(e, Expr::Bin(BinOp::Mul, ref l, _) if matches!(**l, Expr::Neg(_))));
}

#[test]
fn syntax_errors_carry_positions() {
    let cases = [
        ("x^^2", 1, 3),
        ("x^", 1, 3),
        ("2x", 1, 2),
        ("(x+1", 1, 5),
        ("x^2^3", 1, 4),
        ("x +\n y $", 2, 4),
        ("[[1,2]", 1, 7),
    ];
    for (src, line, column) in cases {
        let err = parse_expr(src, Symbols::ALL).unwrap_err();
        assert_eq!((err.line, err.column), (line, column), "{src}: {err}");
    }
    let err = parse_expr("q*x", Symbols { x: true, q: false }).unwrap_err();
    assert_eq!((err.line, err.column), (1, 1));
}
