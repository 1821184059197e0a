//! Line-oriented netlist text:
//!
//! ```text
//! DLGN v1
//! config <input_dim> <L> <k> <C>
//! g <layer> <index> <GATE_NAME> <in0> <in1>
//! ```
//!
//! with one `g` line per neuron in layer-major order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{HardCircuit, HardGate};
use crate::codebook::GateId;
use crate::error::{Error, Result};

pub fn render_netlist(c: &HardCircuit) -> String {
    let mut s = String::new();
    s.push_str("DLGN v1\n");
    writeln!(s, "config {} {} {} {}", c.input_dim, c.depth(), c.width(), c.classes).expect("string write");
    for (l, layer) in c.layers.iter().enumerate() {
        for (n, g) in layer.iter().enumerate() {
            writeln!(s, "g {l} {n} {} {} {}", g.gate.name(), g.in0, g.in1).expect("string write");
        }
    }
    s
}

pub fn parse_netlist(text: &str) -> Result<HardCircuit> {
    let err = |line: usize, msg: String| Error::Netlist { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "DLGN v1")) => {}
        Some((n, l)) if l.starts_with("DLGN ") => return Err(err(n, format!("unsupported version `{l}`"))),
        Some((n, _)) => return Err(err(n, "missing `DLGN v1` header".into())),
        None => return Err(err(0, "empty netlist".into())),
    }
    let (n, cfg) = lines.next().ok_or_else(|| err(0, "missing config line".into()))?;
    let f: Vec<&str> = cfg.split_whitespace().collect();
    if f.len() != 5 || f[0] != "config" {
        return Err(err(n, "expected `config <input_dim> <L> <k> <C>`".into()));
    }
    let nums: Vec<usize> = f[1..]
        .iter()
        .map(|x| x.parse().map_err(|_| err(n, format!("bad integer `{x}`"))))
        .collect::<Result<_>>()?;
    let (input_dim, depth, width, classes) = (nums[0], nums[1], nums[2], nums[3]);
    if depth == 0 || width == 0 {
        return Err(err(n, "circuit has an empty layer".into()));
    }

    let mut layers = vec![Vec::with_capacity(width); depth];
    let mut count = 0usize;
    for (n, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 || f[0] != "g" {
            return Err(err(n, "expected `g <layer> <index> <GATE> <in0> <in1>`".into()));
        }
        let int = |x: &str| x.parse::<usize>().map_err(|_| err(n, format!("bad integer `{x}`")));
        let (l, i) = (int(f[1])?, int(f[2])?);
        let (el, ei) = (count / width, count % width);
        if l >= depth || (l, i) != (el, ei) {
            return Err(err(n, format!("expected gate {el} {ei}, found {l} {i}")));
        }
        let gate: GateId = f[3].parse().map_err(|_| err(n, format!("unknown gate name `{}`", f[3])))?;
        let (in0, in1) = (int(f[4])?, int(f[5])?);
        let src = if l == 0 { input_dim } else { width };
        if in0 >= src || in1 >= src {
            return Err(err(n, format!("input index out of range for source width {src}")));
        }
        if in0 == in1 {
            return Err(err(n, format!("gate reads input {in0} twice")));
        }
        layers[l].push(HardGate {
            gate,
            in0: in0 as u32,
            in1: in1 as u32,
        });
        count += 1;
    }
    if count != depth * width {
        return Err(err(0, format!("expected {} gates, found {count}", depth * width)));
    }
    let c = HardCircuit {
        input_dim,
        classes,
        layers,
    };
    c.validate()?;
    Ok(c)
}

pub fn write_netlist(path: &Path, c: &HardCircuit) -> Result<()> {
    crate::fsutil::write_atomic(path, render_netlist(c).as_bytes())
}

pub fn read_netlist(path: &Path) -> Result<HardCircuit> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_netlist(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> HardCircuit {
        let g = |gate, in0, in1| HardGate { gate, in0, in1 };
        HardCircuit {
            input_dim: 3,
            classes: 2,
            layers: vec![
                vec![g(GateId::AND, 0, 1), g(GateId::XOR, 1, 2)],
                vec![g(GateId::NOT_A_OR_B, 1, 0), g(GateId::TRUE, 0, 1)],
            ],
        }
    }

    #[test]
    fn roundtrip() {
        let text = render_netlist(&toy());
        assert!(text.starts_with("DLGN v1\nconfig 3 2 2 2\ng 0 0 AND 0 1\n"));
        assert_eq!(parse_netlist(&text).unwrap(), toy());
    }

    #[test]
    fn tampered_name_reports_line() {
        let text = render_netlist(&toy()).replace("XOR", "XORR");
        match parse_netlist(&text) {
            Err(Error::Netlist { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("XORR"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_netlist("DLGN v2\nconfig 3 1 2 2\n").is_err());
        assert!(parse_netlist("DLGN v1\nconfig 3 0 2 2\n").is_err());
        assert!(parse_netlist("DLGN v1\nconfig 3 1 2 2\n").is_err());
        assert!(parse_netlist("DLGN v1\nconfig 3 1 2 2\ng 0 0 AND 0 5\ng 0 1 AND 0 1\n").is_err());
    }
}
