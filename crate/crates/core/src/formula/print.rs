use super::Formula;

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

pub(super) fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_child(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

fn write_binary(lhs: &Formula, op: &str, rhs: &Formula, own: u8, right_assoc: bool, out: &mut String) {
    let (lhs_parens, rhs_parens) = if right_assoc {
        (level(lhs) <= own, level(rhs) < own)
    } else {
        (level(lhs) < own, level(rhs) <= own)
    };
    write_child(lhs, lhs_parens, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_child(rhs, rhs_parens, out);
}

fn write(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Not(a) => {
            out.push('~');
            write_child(a, level(a) < UNARY, out);
        }
        Formula::Box(i, a) => {
            out.push_str(&format!("[{i}]"));
            write_child(a, level(a) < UNARY, out);
        }
        Formula::Diamond(i, a) => {
            out.push_str(&format!("<{i}>"));
            write_child(a, level(a) < UNARY, out);
        }
        Formula::Some(a) => {
            out.push_str("S ");
            write_child(a, level(a) < UNARY, out);
        }
        Formula::Dist(a) => {
            out.push_str("D ");
            write_child(a, level(a) < UNARY, out);
        }
        Formula::And(a, b) => write_binary(a, "&", b, AND, false, out),
        Formula::Or(a, b) => write_binary(a, "|", b, OR, false, out),
        Formula::Implies(a, b) => write_binary(a, "->", b, IMPLIES, true, out),
        Formula::Iff(a, b) => write_binary(a, "<->", b, IFF, false, out),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, print};
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn examples() {
        assert_eq!(print(&Formula::knows(1, p())), "[1]p");
        let f = Formula::and(p(), Formula::or(Formula::atom("q"), Formula::atom("r")));
        assert_eq!(print(&f), "p & (q | r)");
        assert_eq!(print(&Formula::somebody(p())), "S p");
        assert_eq!(print(&Formula::dist(Formula::not(p()))), "D ~p");
    }

    #[test]
    fn associativity_parentheses() {
        let q = Formula::atom("q");
        let r = Formula::atom("r");
        let left = Formula::implies(Formula::implies(p(), q.clone()), r.clone());
        assert_eq!(print(&left), "(p -> q) -> r");
        let right = Formula::implies(p(), Formula::implies(q.clone(), r.clone()));
        assert_eq!(print(&right), "p -> q -> r");
        let nested = Formula::and(p(), Formula::and(q.clone(), r.clone()));
        assert_eq!(print(&nested), "p & (q & r)");
        let flat = Formula::and(Formula::and(p(), q), r);
        assert_eq!(print(&flat), "p & q & r");
    }

    pub(crate) fn arb_formula(n: usize) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![Just("p"), Just("q"), Just("r1"), Just("x_y")].prop_map(Formula::atom);
        leaf.prop_recursive(5, 48, 2, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (1..=n, inner.clone()).prop_map(|(i, f)| Formula::knows(i, f)),
                (1..=n, inner.clone()).prop_map(|(i, f)| Formula::possible(i, f)),
                inner.clone().prop_map(Formula::somebody),
                inner.clone().prop_map(Formula::dist),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_print(f in arb_formula(3)) {
            let text = print(&f);
            prop_assert_eq!(parse(&text, 3).unwrap(), f);
        }
    }
}
