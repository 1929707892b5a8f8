//! Random expression trees against the parser, the printer and an independent evaluator.

use nefdual::varexpr::{parse, BinOp, Func, VarExpr};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = VarExpr> {
    prop_oneof![
        Just(VarExpr::M),
        (0u32..20).prop_map(|n| VarExpr::Num(n as f64)),
        (0.0f64..10.0).prop_map(VarExpr::Num),
        (1e-8f64..1e-3).prop_map(VarExpr::Num),
    ]
}

fn expr() -> impl Strategy<Value = VarExpr> {
    let ops = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
    let funcs = proptest::sample::select(Func::ALL.to_vec());
    leaf().prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| VarExpr::Neg(Box::new(a))),
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| VarExpr::bin(op, a, b)),
            (funcs.clone(), inner).prop_map(|(f, a)| VarExpr::Call(f, Box::new(a))),
        ]
    })
}

/// Recursive-descent evaluator working on the text directly, with the same
/// precedence rules and domain faults as the library. `None` marks a fault.
struct Reference<'a> {
    s: &'a [u8],
    i: usize,
    m: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Reference<'_> {
    fn eval(text: &str, m: f64) -> Option<f64> {
        let mut r = Reference { s: text.as_bytes(), i: 0, m };
        let v = r.sum();
        r.ws();
        assert_eq!(r.i, r.s.len(), "reference parser stopped early in {text}");
        v
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    // Faults inside a subtree must still consume its text, so values are
    // threaded as Option and checked only after parsing.
    fn sum(&mut self) -> Option<f64> {
        let mut acc = self.product();
        loop {
            if self.eat(b'+') {
                let r = self.product();
                acc = acc.zip(r).and_then(|(a, b)| finite(a + b));
            } else if self.eat(b'-') {
                let r = self.product();
                acc = acc.zip(r).and_then(|(a, b)| finite(a - b));
            } else {
                return acc;
            }
        }
    }

    fn product(&mut self) -> Option<f64> {
        let mut acc = self.unary();
        loop {
            if self.eat(b'*') {
                let r = self.unary();
                acc = acc.zip(r).and_then(|(a, b)| finite(a * b));
            } else if self.eat(b'/') {
                let r = self.unary();
                acc = acc.zip(r).and_then(|(a, b)| if b == 0.0 { None } else { finite(a / b) });
            } else {
                return acc;
            }
        }
    }

    fn unary(&mut self) -> Option<f64> {
        if self.eat(b'-') {
            return self.unary().map(|x| -x);
        }
        let base = self.primary();
        if self.eat(b'^') {
            let e = self.unary();
            return base.zip(e).and_then(|(x, y)| {
                if (x == 0.0 && y < 0.0) || (x < 0.0 && y.fract() != 0.0) {
                    None
                } else {
                    finite(x.powf(y))
                }
            });
        }
        base
    }

    fn primary(&mut self) -> Option<f64> {
        self.ws();
        if self.eat(b'(') {
            let v = self.sum();
            assert!(self.eat(b')'));
            return v;
        }
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
            self.i += 1;
        }
        if self.i > start {
            let word = std::str::from_utf8(&self.s[start..self.i]).unwrap();
            if word == "m" {
                return Some(self.m);
            }
            assert!(self.eat(b'('));
            let a = self.sum();
            assert!(self.eat(b')'));
            return a.and_then(|x| match word {
                "exp" => finite(x.exp()),
                "log" if x > 0.0 => finite(x.ln()),
                "sqrt" if x >= 0.0 => finite(x.sqrt()),
                "sinh" => finite(x.sinh()),
                "cosh" => finite(x.cosh()),
                "cos" => finite(x.cos()),
                "arctan" => finite(x.atan()),
                "log" | "sqrt" => None,
                other => panic!("unknown function {other}"),
            });
        }
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || b".eE".contains(&self.s[self.i])) {
            // exponent sign
            if b"eE".contains(&self.s[self.i]) && self.i + 1 < self.s.len() && b"+-".contains(&self.s[self.i + 1]) {
                self.i += 1;
            }
            self.i += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        Some(text.parse().unwrap_or_else(|_| panic!("bad number {text}")))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e);
    }

    #[test]
    fn eval_matches_reference(e in expr(), m in -3.0f64..3.0) {
        let text = e.to_string();
        let got = parse(&text).unwrap().eval(m).ok();
        let want = Reference::eval(&text, m);
        match (got, want) {
            (Some(a), Some(b)) => prop_assert!(
                (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE),
                "{} at m = {}: {} vs {}", text, m, a, b
            ),
            (None, None) => {}
            (a, b) => prop_assert!(false, "{} at m = {}: library {:?}, reference {:?}", text, m, a, b),
        }
    }

    #[test]
    fn garbage_never_panics(s in "[-+*/^()m0-9a-z. ]{0,24}") {
        let _ = parse(&s);
    }
}
