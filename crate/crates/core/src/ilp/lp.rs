//! CPLEX-style LP text output.

use std::fmt::Write;

use super::{IlpInstance, VarKind};

const LINE_WIDTH: usize = 100;

fn coef(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

/// Appends `+ c name` terms, wrapping long lines.
fn push_terms(out: &mut String, line: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    let mut first = true;
    for (c, name) in terms {
        let sign = if c < 0.0 { "-" } else if first { "" } else { "+" };
        let mag = c.abs();
        let piece = if mag == 1.0 {
            format!("{sign} {name}")
        } else {
            format!("{sign} {} {name}", coef(mag))
        };
        let piece = piece.trim_start().to_string();
        if line.len() + piece.len() + 1 > LINE_WIDTH {
            out.push_str(line.trim_end());
            out.push('\n');
            line.clear();
            line.push_str("   ");
        }
        line.push(' ');
        line.push_str(&piece);
        first = false;
    }
}

fn flush(out: &mut String, line: &mut String) {
    out.push_str(line.trim_end());
    out.push('\n');
    line.clear();
}

pub fn write_lp(inst: &IlpInstance) -> String {
    let p = &inst.params;
    let mut out = String::new();
    let _ = writeln!(out, "\\ RSCA model, {} propagation", p.mode);
    let _ = writeln!(
        out,
        "\\ links={} cores={} slots={} fibers_per_link={} demands={} k={} link_disjoint={}",
        inst.link_count,
        inst.core_count,
        p.slots,
        inst.fibers_per_link,
        inst.demands.len(),
        p.k,
        p.link_disjoint
    );
    let _ = writeln!(out, "\\ alpha={} epsilon={} mipgap=0.01%", p.alpha, p.epsilon);
    let ms: Vec<String> = inst.big_m_used.iter().map(|(f, m)| format!("c{f}:{}", coef(*m))).collect();
    let _ = writeln!(out, "\\ big-M {}", ms.join(" "));
    let _ = writeln!(out, "\\ variables={} constraints={}", inst.variables.len(), inst.constraints.len());
    for (r, d) in inst.demands.iter().enumerate() {
        for (pi, route) in inst.routes[r].iter().enumerate() {
            let _ = writeln!(
                out,
                "\\ r{}p{}: demand {} {}->{} fs={} route {}",
                r + 1,
                pi + 1,
                d.id,
                d.src,
                d.dst,
                d.fs_count,
                route.to_node_string()
            );
        }
    }
    // link-sharing indicator, informational only
    for r1 in 0..inst.routes.len() {
        for r2 in (r1 + 1)..inst.routes.len() {
            for p1 in 0..inst.routes[r1].len() {
                for p2 in 0..inst.routes[r2].len() {
                    if inst.delta(r1, p1, r2, p2) {
                        let _ = writeln!(out, "\\ delta r{}p{} r{}p{} = 1", r1 + 1, p1 + 1, r2 + 1, p2 + 1);
                    }
                }
            }
        }
    }

    out.push_str("Minimize\n");
    let mut line = String::from(" obj:");
    if inst.objective.is_empty() {
        line.push_str(" 0 ");
        line.push_str(&inst.variables[0].name);
    } else {
        push_terms(
            &mut out,
            &mut line,
            inst.objective.iter().map(|&(v, c)| (c, inst.variables[v].name.clone())),
        );
    }
    flush(&mut out, &mut line);

    out.push_str("Subject To\n");
    for row in &inst.constraints {
        line.push(' ');
        line.push_str(&row.name);
        line.push(':');
        push_terms(
            &mut out,
            &mut line,
            row.terms.iter().map(|&(v, c)| (c, inst.variables[v].name.clone())),
        );
        let rhs = if row.rhs == 0.0 { 0.0 } else { row.rhs };
        let _ = write!(line, " {} {}", row.sense, coef(rhs));
        flush(&mut out, &mut line);
    }

    out.push_str("Bounds\n");
    for v in inst.variables.iter().filter(|v| v.kind == VarKind::Integer) {
        let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
    }

    out.push_str("Binaries\n");
    let bins = inst.variables.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str());
    write_names(&mut out, bins);
    out.push_str("Generals\n");
    let gens = inst.variables.iter().filter(|v| v.kind == VarKind::Integer).map(|v| v.name.as_str());
    write_names(&mut out, gens);
    out.push_str("End\n");
    out
}

fn write_names<'a>(out: &mut String, names: impl Iterator<Item = &'a str>) {
    let mut line = String::new();
    for n in names {
        if line.len() + n.len() + 1 > LINE_WIDTH {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push(' ');
        line.push_str(n);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
}
