//! String grammar for symbols, coefficients, multipliers, grid functions and
//! operators, as used by the CLI and config files.
//!
//! ```text
//! symbol      bracket_power(m) | mode(k) | sin_coeff(m) | xi1 | xi2
//!             | weierstrass_times_bracket(tau, m[, J]) | coefficient(<coef>)
//!             | separable(<coef>, <mult>)
//! coefficient one | const(c) | sin(k) | cos(k) | mode(k) | gauss
//!             | weierstrass(tau[, J]) | cos32 (shorthand for cos(32))
//! multiplier  one | bracket(m) | xi1 | xi2
//! operator    identity | zero | bessel(s) | multiply:<coef>
//!             | multiplier:<mult> | quantize:<symbol> | <op> . <op>
//! amplitude   gaussian | one | y_gaussian | translated_gaussian(y0, eta0)
//! length      <number> | pi | <number>pi
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operators::{self, Operator};
use crate::oscint::Amplitude;
use crate::symbols::{Coefficient, Multiplier, Symbol};

/// `name(arg, arg, ...)` split at top-level commas.
struct Call<'a> {
    name: &'a str,
    args: Vec<&'a str>,
}

fn parse_error(input: &str, message: impl Into<String>) -> Error {
    Error::Parse { input: input.to_string(), message: message.into() }
}

fn call(input: &str) -> Result<Call<'_>> {
    let s = input.trim();
    let Some(open) = s.find('(') else {
        return Ok(Call { name: s, args: Vec::new() });
    };
    if !s.ends_with(')') {
        return Err(parse_error(input, "missing closing parenthesis"));
    }
    let name = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(parse_error(input, "unbalanced parentheses"));
                }
            }
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(parse_error(input, "unbalanced parentheses"));
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim());
    }
    Ok(Call { name, args })
}

fn number(input: &str, arg: &str) -> Result<f64> {
    arg.parse::<f64>().map_err(|_| parse_error(input, format!("`{arg}` is not a number")))
}

fn count(input: &str, arg: &str) -> Result<u32> {
    arg.parse::<u32>().map_err(|_| parse_error(input, format!("`{arg}` is not a term count")))
}

fn arity(input: &str, c: &Call<'_>, allowed: &[usize]) -> Result<()> {
    if allowed.contains(&c.args.len()) {
        Ok(())
    } else {
        Err(parse_error(input, format!("`{}` takes {allowed:?} arguments, got {}", c.name, c.args.len())))
    }
}

pub fn symbol(spec: &str) -> Result<Symbol> {
    let c = call(spec)?;
    let unary = |c: &Call<'_>| -> Result<f64> {
        arity(spec, c, &[1])?;
        number(spec, c.args[0])
    };
    match c.name {
        "bracket_power" => Ok(Symbol::bracket_power(unary(&c)?)),
        "mode" => Ok(Symbol::mode(unary(&c)?)),
        "sin_coeff" => Ok(Symbol::sin_coeff(unary(&c)?)),
        "xi" | "xi1" => Ok(Symbol::coordinate(0)),
        "xi2" => Ok(Symbol::coordinate(1)),
        "weierstrass_times_bracket" => {
            arity(spec, &c, &[2, 3])?;
            let terms = c.args.get(2).map(|a| count(spec, a)).transpose()?;
            Ok(Symbol::weierstrass_times_bracket(number(spec, c.args[0])?, number(spec, c.args[1])?, terms))
        }
        "coefficient" | "coef" => {
            arity(spec, &c, &[1])?;
            Ok(Symbol::coefficient(coefficient(c.args[0])?))
        }
        "separable" => {
            arity(spec, &c, &[2])?;
            let (a, q) = (coefficient(c.args[0])?, multiplier(c.args[1])?);
            Ok(Symbol::separable(a, q))
        }
        name => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

pub fn coefficient(spec: &str) -> Result<Coefficient> {
    let c = call(spec)?;
    let unary = |c: &Call<'_>| -> Result<f64> {
        arity(spec, c, &[1])?;
        number(spec, c.args[0])
    };
    match c.name {
        "one" | "1" => Ok(Coefficient::One),
        "const" => Ok(Coefficient::Constant(unary(&c)?)),
        "sin" => Ok(Coefficient::Sin(unary(&c)?)),
        "cos" => Ok(Coefficient::Cos(unary(&c)?)),
        "mode" => Ok(Coefficient::Mode(unary(&c)?)),
        "gauss" | "gaussian" => Ok(Coefficient::Gaussian),
        "weierstrass" => {
            arity(spec, &c, &[1, 2])?;
            let terms = c.args.get(1).map(|a| count(spec, a)).transpose()?;
            Ok(Coefficient::Weierstrass { tau: number(spec, c.args[0])?, terms })
        }
        name if c.args.is_empty() => shorthand(name).ok_or_else(|| Error::UnknownBuiltin(name.to_string())),
        name => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// `cos32`, `sin2`, `mode3`.
fn shorthand(name: &str) -> Option<Coefficient> {
    for (prefix, make) in [
        ("cos", Coefficient::Cos as fn(f64) -> Coefficient),
        ("sin", Coefficient::Sin),
        ("mode", Coefficient::Mode),
    ] {
        if let Some(k) = name.strip_prefix(prefix).and_then(|r| r.parse::<f64>().ok()) {
            return Some(make(k));
        }
    }
    None
}

pub fn multiplier(spec: &str) -> Result<Multiplier> {
    let c = call(spec)?;
    match c.name {
        "one" | "1" => Ok(Multiplier::one()),
        "bracket" | "bracket_power" => {
            arity(spec, &c, &[1])?;
            Ok(Multiplier::bracket_power(number(spec, c.args[0])?))
        }
        "xi" | "xi1" => Ok(Multiplier::coordinate(0)),
        "xi2" => Ok(Multiplier::coordinate(1)),
        name => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// Samples a coefficient expression on `grid`.
pub fn function(spec: &str, grid: &Grid) -> Result<GridFunction> {
    let e = coefficient(spec)?.expand(grid);
    let dim = grid.dim;
    Ok(GridFunction::from_fn(*grid, |x| e.value(&x[..dim])))
}

/// Builds an operator on `grid`. `A . B` composes (`B` acts first).
pub fn operator(spec: &str, grid: &Grid) -> Result<Operator> {
    let parts: Vec<&str> = spec.split(" . ").collect();
    if parts.len() > 1 {
        let ops = parts.iter().map(|p| operator(p, grid)).collect::<Result<Vec<_>>>()?;
        return operators::compose(ops);
    }
    let s = spec.trim();
    if let Some(rest) = s.strip_prefix("multiply:") {
        return Ok(Arc::new(operators::Multiplication::from_coefficient(*grid, &coefficient(rest)?)));
    }
    if let Some(rest) = s.strip_prefix("multiplier:") {
        return Ok(Arc::new(operators::FourierMultiplier::from_multiplier(*grid, &multiplier(rest)?)));
    }
    if let Some(rest) = s.strip_prefix("quantize:") {
        return Ok(Arc::new(operators::Quantized::new(*grid, &symbol(rest)?)?));
    }
    let c = call(s)?;
    match c.name {
        "identity" => Ok(Arc::new(operators::Identity::new(*grid))),
        "zero" => Ok(Arc::new(operators::Zero::new(*grid))),
        "bessel" => {
            arity(spec, &c, &[1])?;
            Ok(Arc::new(operators::FourierMultiplier::bessel(*grid, number(spec, c.args[0])?)))
        }
        name => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// Amplitudes on `ℝ^dim × ℝ^dim`; translation shifts every axis alike.
pub fn amplitude(spec: &str, dim: usize) -> Result<Amplitude> {
    let c = call(spec)?;
    match c.name {
        "gaussian" => Ok(Amplitude::gaussian(dim)),
        "one" => Ok(Amplitude::one(dim)),
        "y_gaussian" => Ok(Amplitude::from_y(dim, "y_gaussian", 7.5, 7.5, |y| {
            crate::grid::C64::new((-0.5 * y.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0)
        })),
        "translated_gaussian" => {
            arity(spec, &c, &[2])?;
            let (y0, eta0) = (number(spec, c.args[0])?, number(spec, c.args[1])?);
            Ok(Amplitude::gaussian(dim).translated(&vec![y0; dim], &vec![eta0; dim]))
        }
        name => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// A box half-length such as `3.5`, `pi` or `4pi`.
pub fn length(spec: &str) -> Result<f64> {
    let s = spec.trim();
    let v = match s.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some(c) => number(spec, c.trim_end_matches('*'))? * std::f64::consts::PI,
        None => number(spec, s)?,
    };
    if !(v.is_finite() && v > 0.0) {
        return Err(parse_error(spec, "length must be positive"));
    }
    Ok(v)
}

/// Grid-independent operator description, rebuilt on each grid it is asked for.
pub fn operator_family(spec: &str) -> Result<operators::OperatorFamily> {
    let probe = Grid::default_for(1)?;
    operator(spec, &probe)?;
    let spec = spec.to_string();
    Ok(Arc::new(move |g: &Grid| operator(&spec, g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_arguments() {
        let p = symbol("separable(weierstrass(0.5,4), bracket(1))").unwrap();
        assert!(p.label.contains("weierstrass"));
        assert_eq!(coefficient("cos32").unwrap(), Coefficient::Cos(32.0));
        assert!(matches!(symbol("foo(1)"), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(symbol("bracket_power(1"), Err(Error::Parse { .. })));
        assert!(matches!(symbol("bracket_power(a)"), Err(Error::Parse { .. })));
    }

    #[test]
    fn lengths_and_amplitudes() {
        assert_eq!(length("pi").unwrap(), std::f64::consts::PI);
        assert_eq!(length("4pi").unwrap(), 4.0 * std::f64::consts::PI);
        assert_eq!(length("2.5").unwrap(), 2.5);
        assert!(length("-1").is_err());
        assert_eq!(amplitude("translated_gaussian(1, -2)", 1).unwrap().dim(), 1);
        assert!(amplitude("sawtooth", 1).is_err());
    }

    #[test]
    fn operator_specs() {
        let g = Grid::new(1, 16, 3.0).unwrap();
        let u = GridFunction::gaussian(g);
        let t = operator("multiply:const(2) . identity", &g).unwrap();
        let v = t.apply(&u).unwrap();
        assert!((v.l2_norm() - 2.0 * u.l2_norm()).abs() < 1e-12);
        assert!(operator("bogus", &g).is_err());
    }
}
