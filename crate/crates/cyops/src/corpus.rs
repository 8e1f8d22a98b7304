//! The named operator corpus, shipped as text files in the CLI grammar.

use crate::error::{CyError, Result};
use crate::operator::DOperator;
use crate::parse::parse_operator;

const FILES: &[(&str, &str)] = &[
    ("quintic", include_str!("../corpus/quintic.txt")),
    ("E", include_str!("../corpus/E.txt")),
    ("E_tilde", include_str!("../corpus/E_tilde.txt")),
    ("R1", include_str!("../corpus/R1.txt")),
    ("R2", include_str!("../corpus/R2.txt")),
    ("R3", include_str!("../corpus/R3.txt")),
    ("R4", include_str!("../corpus/R4.txt")),
    ("R5", include_str!("../corpus/R5.txt")),
];

pub fn corpus_names() -> Vec<&'static str> {
    FILES.iter().map(|(n, _)| *n).collect()
}

/// The `# source:` header of a corpus entry.
pub fn corpus_source(name: &str) -> Option<&'static str> {
    let (_, body) = FILES.iter().find(|(n, _)| *n == name)?;
    body.lines()
        .find(|l| l.starts_with("# source:"))
        .map(|l| l["# source:".len()..].trim())
}

/// Strip `#` headers and parse the remaining expression.
pub fn parse_corpus_text(body: &str) -> Result<DOperator> {
    let expr: String = body
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    parse_operator(&expr)
}

pub fn corpus_get(name: &str) -> Result<DOperator> {
    let (_, body) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CyError::UnknownOperator(name.to_string()))?;
    parse_corpus_text(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{indicial, Point};
    use crate::poly::Poly;
    use crate::rat;
    use crate::Rat;
    use num_traits::Zero;

    #[test]
    fn all_entries_parse() {
        for name in corpus_names() {
            let op = corpus_get(name).unwrap();
            assert!(op.order() >= 1, "{name} parsed to a constant");
            assert!(corpus_source(name).is_some());
        }
    }

    #[test]
    fn e_tilde_is_inverse_pullback_of_e() {
        let e = corpus_get("E").unwrap().to_theta_form();
        let et = corpus_get("E_tilde").unwrap().to_theta_form();
        let pulled = e.pullback_inversion();
        assert_eq!(pulled.slices(), et.slices());
    }

    #[test]
    fn e_tilde_indicial_at_zero_is_t_squared() {
        let et = corpus_get("E_tilde").unwrap().to_theta_form();
        let ind = indicial(&et, &Point::Finite(Rat::zero())).unwrap();
        assert_eq!(ind.polynomial, Poly::from_i64(&[0, 0, 1]));
        assert_eq!(ind.mum_exponent(2), Some(0));
    }

    #[test]
    fn r_operators_are_order_seven_and_mum() {
        for name in ["R1", "R2", "R3", "R4", "R5"] {
            let op = corpus_get(name).unwrap();
            assert_eq!(op.order(), 7, "{name}");
            let ind = indicial(&op.to_theta_form(), &Point::Finite(rat(0))).unwrap();
            assert_eq!(ind.mum_exponent(7), Some(0), "{name}");
        }
    }

    #[test]
    fn render_round_trip_through_parser() {
        for name in corpus_names() {
            let theta = corpus_get(name).unwrap().to_theta_form();
            let again = crate::parse::parse_operator(&theta.render())
                .unwrap()
                .to_theta_form();
            assert_eq!(theta.slices(), again.slices(), "{name}");
        }
    }
}
