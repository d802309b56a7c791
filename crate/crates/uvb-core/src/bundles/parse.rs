use super::{BundleError, BundleExpr};

/// Parses `O(a)`, `T`, `Om`, `dual(E)`, `wedge(p,E)`, `sym(p,E)`, twists `E(a)`,
/// sums `E + F` and repeated sums `E^m`.
pub fn parse_expr(text: &str) -> Result<BundleExpr, BundleError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let e = p.sum()?;
    p.ws();
    if p.pos < p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> BundleError {
        BundleError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), BundleError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn int(&mut self) -> Result<i64, BundleError> {
        self.ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| BundleError::Syntax { pos: start, msg: "expected an integer".into() })
    }

    fn count(&mut self) -> Result<u32, BundleError> {
        let start = self.pos;
        let v = self.int()?;
        u32::try_from(v).map_err(|_| BundleError::Syntax { pos: start, msg: "expected a non-negative integer".into() })
    }

    fn ident(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn sum(&mut self) -> Result<BundleExpr, BundleError> {
        let mut parts = vec![self.power()?];
        while self.eat(b'+') {
            parts.push(self.power()?);
        }
        Ok(BundleExpr::sum(parts))
    }

    fn power(&mut self) -> Result<BundleExpr, BundleError> {
        let base = self.postfix()?;
        if self.eat(b'^') {
            let m = self.count()?;
            if m == 0 {
                return Err(self.err("repeat count must be positive"));
            }
            return Ok(BundleExpr::sum(std::iter::repeat_n(base, m as usize)));
        }
        Ok(base)
    }

    fn postfix(&mut self) -> Result<BundleExpr, BundleError> {
        let mut e = self.primary()?;
        while self.eat(b'(') {
            let a = self.int()?;
            self.expect(b')')?;
            e = e.twist(a);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<BundleExpr, BundleError> {
        if self.eat(b'(') {
            let e = self.sum()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let start = self.pos;
        match self.ident().as_str() {
            "O" => {
                self.expect(b'(')?;
                let a = self.int()?;
                self.expect(b')')?;
                Ok(BundleExpr::Line(a))
            }
            "T" => Ok(BundleExpr::Tangent),
            "Om" | "Omega" => Ok(BundleExpr::Cotangent),
            "dual" => {
                self.expect(b'(')?;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(BundleExpr::Dual(Box::new(e)))
            }
            op @ ("wedge" | "sym") => {
                let op = op.to_string();
                self.expect(b'(')?;
                let p = self.count()?;
                self.expect(b',')?;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(if op == "wedge" { BundleExpr::Wedge(p, Box::new(e)) } else { BundleExpr::Sym(p, Box::new(e)) })
            }
            "" => Err(BundleError::Syntax { pos: start, msg: "expected a bundle".into() }),
            other => Err(BundleError::Syntax { pos: start, msg: format!("unknown bundle '{other}'") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        for s in ["T(-1) + O(1)^2", "wedge(2,T(-1))", "Om(2)", "O(0)^3 + O(1)", "dual(T)(3)", "(T + O(1))(2)"] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s}");
        }
        assert_eq!(parse_expr("T(-1)+O(1)^2").unwrap().to_string(), "T(-1) + O(1)^2");
    }

    #[test]
    fn twists_fold_into_lines() {
        assert_eq!(parse_expr("O(2)(3)").unwrap(), BundleExpr::Line(5));
        assert_eq!(parse_expr("T(1)(-1)").unwrap(), BundleExpr::Tangent);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_expr("T + Q").unwrap_err(), BundleError::Syntax { pos: 4, msg: "unknown bundle 'Q'".into() });
        assert!(matches!(parse_expr("O(x)"), Err(BundleError::Syntax { pos: 2, .. })));
        assert!(parse_expr("T )").is_err());
    }
}
