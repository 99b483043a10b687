use super::{FieldParams, PolyFq};
use crate::error::{parse_err, Result};

pub(super) fn parse_poly(field: FieldParams, input: &str) -> Result<PolyFq> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(parse_err(input, "empty polynomial"));
    }
    if s.contains('x') || s.contains('X') {
        parse_symbolic(field, input, &s.to_ascii_lowercase())
    } else {
        let coeffs = s
            .split(',')
            .map(|c| {
                c.parse::<i64>()
                    .map_err(|e| parse_err(input, format!("bad coefficient {c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyFq::new(field, &coeffs))
    }
}

fn parse_symbolic(field: FieldParams, input: &str, s: &str) -> Result<PolyFq> {
    let mut coeffs: Vec<i64> = Vec::new();
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);

    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'+') => (1i64, &term[1..]),
            Some(b'-') => (-1i64, &term[1..]),
            _ => (1i64, term),
        };
        if body.is_empty() {
            return Err(parse_err(input, "dangling sign"));
        }
        let (coef, exp) = match body.find('x') {
            None => (parse_int(input, body)?, 0usize),
            Some(pos) => {
                let head = body[..pos].trim_end_matches('*');
                let coef = if head.is_empty() {
                    1
                } else {
                    parse_int(input, head)?
                };
                let tail = &body[pos + 1..];
                let exp = if tail.is_empty() {
                    1
                } else if let Some(e) = tail.strip_prefix('^') {
                    e.parse::<usize>()
                        .map_err(|_| parse_err(input, format!("bad exponent {e:?}")))?
                } else {
                    return Err(parse_err(input, format!("unexpected {tail:?} after x")));
                };
                (coef, exp)
            }
        };
        if exp > 4096 {
            return Err(parse_err(input, "exponent too large"));
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        coeffs[exp] += sign * coef;
    }
    Ok(PolyFq::new(field, &coeffs))
}

fn parse_int(input: &str, s: &str) -> Result<i64> {
    s.parse::<i64>()
        .map_err(|_| parse_err(input, format!("bad coefficient {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldParams {
        FieldParams::new(5).unwrap()
    }

    #[test]
    fn both_formats_agree() {
        let a = PolyFq::parse(f5(), "x^3+2*x+1").unwrap();
        let b = PolyFq::parse(f5(), "1,2,0,1").unwrap();
        assert_eq!(a, b);
        assert_eq!(PolyFq::parse(f5(), "x^2 - 1").unwrap().to_string(), "4,0,1");
        assert_eq!(PolyFq::parse(f5(), "3x^2+x").unwrap().to_string(), "0,1,3");
        assert_eq!(PolyFq::parse(f5(), "7").unwrap().to_string(), "2");
    }

    #[test]
    fn rejects_garbage() {
        assert!(PolyFq::parse(f5(), "").is_err());
        assert!(PolyFq::parse(f5(), "x^").is_err());
        assert!(PolyFq::parse(f5(), "1,a").is_err());
        assert!(PolyFq::parse(f5(), "xy").is_err());
    }
}
