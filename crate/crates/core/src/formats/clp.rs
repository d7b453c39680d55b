//! The derivation file format: `cirquent … end` blocks alternating with
//! `step` lines.
//!
//! A step line names the rule and its parameters:
//!
//! ```text
//! step pulldown a=2 b=4 c=1 Gamma={Q} Pi={~Q} Sigma={3}
//! step coupling a=7 b=P c=~P atom=P Theta={2,3}
//! step trade a=x b=w groups=[{u,p};{v,q}] Pi={s}
//! step redraw map={1>root,2>left}
//! ```
//!
//! Omitted roles are empty. Set values carry no whitespace. Indexed roles
//! may also be written directly (`b1=u c1=p Gamma1={x}`).

use std::collections::BTreeMap;

use crate::cirquent::Cirquent;
use crate::derivation::Derivation;
use crate::formats::{cirq, tokenize, FormatError};
use crate::rules::{RuleId, RuleParams, Step};

pub fn parse_derivation(text: &str) -> Result<Derivation, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut cirquents: Vec<Cirquent> = Vec::new();
    let mut steps: Vec<Step> = Vec::new();
    let mut last_line = 0;
    while let Some((line_no, line)) = lines.next() {
        last_line = line_no;
        let tokens = tokenize(line);
        match tokens.as_slice() {
            [] => continue,
            ["cirquent", name] => {
                if cirquents.len() != steps.len() {
                    return Err(FormatError::syntax(
                        line_no,
                        "expected a step line between consecutive cirquents",
                    ));
                }
                cirquents.push(cirq::parse_block_body(name, line_no, &mut lines)?);
            }
            ["cirquent", ..] => {
                return Err(FormatError::syntax(line_no, "cirquent header takes exactly one name"));
            }
            ["step", rest @ ..] => {
                if cirquents.len() != steps.len() + 1 {
                    return Err(FormatError::syntax(
                        line_no,
                        "a step must follow the cirquent it transforms",
                    ));
                }
                steps.push(parse_step(line_no, rest)?);
            }
            [other, ..] => {
                return Err(FormatError::syntax(
                    line_no,
                    format!("expected `cirquent` or `step`, found `{other}`"),
                ));
            }
        }
    }
    Derivation::new(cirquents, steps)
        .map_err(|e| FormatError::syntax(last_line, e.to_string()))
}

fn parse_step(line_no: usize, tokens: &[&str]) -> Result<Step, FormatError> {
    let bad = |message: String| FormatError::syntax(line_no, message);
    let [rule_token, args @ ..] = tokens else {
        return Err(bad("step line names no rule".to_string()));
    };
    let rule = RuleId::parse(rule_token)
        .ok_or_else(|| bad(format!("`{rule_token}` is not a rule")))?;
    let mut params = RuleParams::new();
    let mut seen: Vec<String> = Vec::new();
    let mut claim = |key: &str| -> Result<(), FormatError> {
        if seen.iter().any(|s| s == key) {
            return Err(FormatError::syntax(line_no, format!("duplicate parameter `{key}`")));
        }
        seen.push(key.to_string());
        Ok(())
    };
    for token in args {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| bad(format!("`{token}` is not a key=value parameter")))?;
        claim(key)?;
        if value.is_empty() {
            return Err(bad(format!("parameter `{key}` has no value")));
        }
        match key {
            "atom" => params = params.with_atom(value),
            "map" => params = params.with_mapping(parse_map(line_no, value)?),
            "groups" => {
                for (i, (b, c)) in parse_groups(line_no, value)?.into_iter().enumerate() {
                    claim(&format!("b{}", i + 1))?;
                    claim(&format!("c{}", i + 1))?;
                    params = params
                        .with_central(&format!("b{}", i + 1), b)
                        .with_central(&format!("c{}", i + 1), c);
                }
            }
            _ if is_central_key(key) => params = params.with_central(key, value),
            _ if is_peripheral_key(key) => {
                params = params.with_peripheral(key, parse_set(line_no, value)?)
            }
            _ => return Err(bad(format!("`{key}` is not a step parameter"))),
        }
    }
    Ok(Step::new(rule, params))
}

fn is_central_key(key: &str) -> bool {
    match key {
        "a" | "b" | "c" => true,
        _ => key
            .strip_prefix('b')
            .or_else(|| key.strip_prefix('c'))
            .is_some_and(|digits| !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())),
    }
}

fn is_peripheral_key(key: &str) -> bool {
    ["Gamma", "Delta", "Theta", "Omega", "Sigma", "Pi"].iter().any(|base| {
        key.strip_prefix(base)
            .is_some_and(|digits| digits.bytes().all(|b| b.is_ascii_digit()))
    })
}

fn strip_braces<'a>(line_no: usize, value: &'a str, what: &str) -> Result<&'a str, FormatError> {
    value
        .strip_prefix('{')
        .and_then(|v| v.strip_suffix('}'))
        .ok_or_else(|| FormatError::syntax(line_no, format!("{what} must be written {{…}}")))
}

fn parse_set(line_no: usize, value: &str) -> Result<Vec<String>, FormatError> {
    let inner = strip_braces(line_no, value, "a node set")?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|name| {
            if name.is_empty() {
                Err(FormatError::syntax(line_no, "a node set has an empty member"))
            } else {
                Ok(name.to_string())
            }
        })
        .collect()
}

fn parse_map(line_no: usize, value: &str) -> Result<BTreeMap<String, String>, FormatError> {
    let inner = strip_braces(line_no, value, "a renaming")?;
    let mut map = BTreeMap::new();
    if inner.is_empty() {
        return Ok(map);
    }
    for entry in inner.split(',') {
        let (old, new) = entry.split_once('>').ok_or_else(|| {
            FormatError::syntax(line_no, format!("`{entry}` is not an old>new renaming entry"))
        })?;
        if old.is_empty() || new.is_empty() {
            return Err(FormatError::syntax(line_no, "a renaming entry has an empty side"));
        }
        if map.insert(old.to_string(), new.to_string()).is_some() {
            return Err(FormatError::syntax(line_no, format!("`{old}` is renamed twice")));
        }
    }
    Ok(map)
}

fn parse_groups(line_no: usize, value: &str) -> Result<Vec<(String, String)>, FormatError> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| FormatError::syntax(line_no, "groups must be written [{…};{…}]"))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(';')
        .map(|group| {
            let members = parse_set(line_no, group)?;
            match members.as_slice() {
                [b, c] => Ok((b.clone(), c.clone())),
                _ => Err(FormatError::syntax(
                    line_no,
                    "every trade group pairs exactly two nodes",
                )),
            }
        })
        .collect()
}

pub fn render_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    for (i, c) in d.cirquents().iter().enumerate() {
        if i > 0 {
            out.push_str(&render_step(&d.steps()[i - 1]));
            out.push('\n');
        }
        out.push_str(&cirq::render_block(&(i + 1).to_string(), c));
        if i + 1 < d.cirquents().len() {
            out.push('\n');
        }
    }
    out
}

pub fn render_step(step: &Step) -> String {
    let params = &step.params;
    let mut parts = vec!["step".to_string(), step.rule.to_string()];
    for role in ["a", "b", "c"] {
        if let Some(node) = params.central(role) {
            parts.push(format!("{role}={node}"));
        }
    }
    let mut groups = Vec::new();
    for i in 1.. {
        match (params.central(&format!("b{i}")), params.central(&format!("c{i}"))) {
            (Some(b), Some(c)) => groups.push(format!("{{{b},{c}}}")),
            _ => break,
        }
    }
    if !groups.is_empty() {
        parts.push(format!("groups=[{}]", groups.join(";")));
    }
    if let Some(atom) = params.atom() {
        parts.push(format!("atom={atom}"));
    }
    let named = ["Gamma", "Delta", "Theta", "Omega", "Sigma", "Pi"];
    let render_set = |role: &str, set: &std::collections::BTreeSet<String>| {
        let members: Vec<&str> = set.iter().map(String::as_str).collect();
        format!("{role}={{{}}}", members.join(","))
    };
    for role in named {
        let set = params.peripheral(role);
        if !set.is_empty() {
            parts.push(render_set(role, &set));
        }
    }
    for (role, set) in params.peripherals() {
        if !named.contains(&role.as_str()) {
            parts.push(render_set(role, set));
        }
    }
    if let Some(mapping) = params.mapping() {
        let entries: Vec<String> =
            mapping.iter().map(|(old, new)| format!("{old}>{new}")).collect();
        parts.push(format!("map={{{}}}", entries.join(",")));
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::derivation::{check_proof, Profile};

    #[test]
    fn worked_proof_round_trips() {
        let proof = corpus::worked_proof();
        let text = render_derivation(&proof);
        let parsed = parse_derivation(&text).unwrap();
        assert_eq!(parsed, proof);
        assert_eq!(render_derivation(&parsed), text);
        check_proof(&parsed, Profile::Cl8).unwrap();
    }

    #[test]
    fn single_block_is_a_zero_step_derivation() {
        let text = "cirquent only\nnode 1 gate and\nroot 1\nend\n";
        let d = parse_derivation(text).unwrap();
        assert_eq!(d.step_count(), 0);
        assert!(d.premise().is_axiom());
    }

    #[test]
    fn step_lines_parse_all_parameter_kinds() {
        let line = "step trade a=x b=w groups=[{u,p};{v,q}] Theta={t} Pi={s} Gamma1={g} Omega2={o,p}";
        let step = parse_step(0, &tokenize(line)[1..]).unwrap();
        assert_eq!(step.rule, RuleId::Trade);
        assert_eq!(step.params.central("b1"), Some("u"));
        assert_eq!(step.params.central("c2"), Some("q"));
        assert_eq!(step.params.peripheral("Omega2").len(), 2);
        assert_eq!(render_step(&step), line);

        let redraw = parse_step(0, &["redraw", "map={1>one,2>two}"]).unwrap();
        assert_eq!(redraw.params.mapping().unwrap().get("1"), Some(&"one".to_string()));
        assert_eq!(render_step(&redraw), "step redraw map={1>one,2>two}");
    }

    #[test]
    fn alternation_is_enforced() {
        let two_blocks = "cirquent a\nnode 1 gate and\nroot 1\nend\ncirquent b\nnode 1 gate and\nroot 1\nend\n";
        assert!(parse_derivation(two_blocks).is_err());

        let leading_step = "step coupling a=1 b=2 c=3 atom=P\n";
        assert!(parse_derivation(leading_step).is_err());

        let trailing_step =
            "cirquent a\nnode 1 gate and\nroot 1\nend\nstep coupling a=1 b=2 c=3 atom=P\n";
        assert!(parse_derivation(trailing_step).is_err());
    }

    #[test]
    fn step_syntax_errors_name_the_line() {
        let text = "cirquent a\nnode 1 gate and\nroot 1\nend\nstep conjure a=1\n";
        let err = parse_derivation(text).unwrap_err();
        assert!(err.to_string().contains("line 5"), "{err}");
        assert!(err.to_string().contains("conjure"), "{err}");

        for bad in [
            "step coupling a=1 a=2",
            "step coupling Gamma=1",
            "step coupling x=1",
            "step coupling Gamma={a,}",
            "step redraw map={a>}",
            "step trade groups=[{a}]",
        ] {
            assert!(parse_step(0, &tokenize(bad)[1..]).is_err(), "{bad}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a tiny derivation\n\ncirquent start # the axiom\nnode 1 gate and\nroot 1\nend\n\nstep coupling a=1 b=2 c=3 atom=P # split\ncirquent done\nnode 1 gate or\nnode 2 port P\nnode 3 port ~P\nedge 1 2\nedge 1 3\nroot 1\nend\n";
        let d = parse_derivation(text).unwrap();
        assert_eq!(d.step_count(), 1);
        check_proof(&d, Profile::Cl8).unwrap();
    }
}
