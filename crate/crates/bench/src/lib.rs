//! Deterministic term families for the criterion benches.

use kstar_core::{parse, Term};

/// `a1 . a2 . ... . an` against its right-bracketed-zero variant.
pub fn sequence_pair(n: usize) -> (Term, Term) {
    let acts: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let p = parse(&acts.join(" . ")).expect("valid");
    let q = parse(&format!("{} + 0", acts.join(" . "))).expect("valid");
    (p, q)
}

/// Stars nested `2n` deep whose bodies keep re-entering themselves.
pub fn nested_star(n: usize) -> Term {
    let mut t = "a".to_string();
    for i in 0..n {
        let b = if i % 2 == 0 { "b" } else { "a" };
        t = format!("(a . ({t}) * {b}) * 0");
    }
    parse(&t).expect("valid")
}

/// `(x1 + ... + xn) * 0` against the same summands in reverse order.
pub fn commuted_star(n: usize) -> (Term, Term) {
    let acts: Vec<String> = (0..n).map(|i| format!("a{i} . b")).collect();
    let mut rev = acts.clone();
    rev.reverse();
    let p = parse(&format!("({}) * 0", acts.join(" + "))).expect("valid");
    let q = parse(&format!("({}) * 0", rev.join(" + "))).expect("valid");
    (p, q)
}

/// `(a + a.a + ... + a^(n+1)) * 0` against `a * 0`.
pub fn unfolding_pair(n: usize) -> (Term, Term) {
    let powers: Vec<String> = (1..=n + 1).map(|k| vec!["a"; k].join(" . ")).collect();
    let p = parse(&format!("({}) * 0", powers.join(" + "))).expect("valid");
    (p, parse("a * 0").expect("valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kstar_core::Session;

    #[test]
    fn families_are_bisimilar_where_claimed() {
        let s = Session::new();
        for n in 1..4 {
            let (p, q) = sequence_pair(n);
            assert!(s.bisimilar_terms(&p, &q).unwrap());
            let (p, q) = commuted_star(n);
            assert!(s.bisimilar_terms(&p, &q).unwrap());
            let (p, q) = unfolding_pair(n);
            assert!(s.bisimilar_terms(&p, &q).unwrap());
            assert_eq!(nested_star(n).star_depth(), 2 * n);
        }
    }
}
