//! `key: value` text reports with a fixed field order.

use std::fmt::Write;

use mixkt::Rectangle;

/// Rounds to `digits` significant digits and prints the shortest form.
pub fn fmt_num(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", digits.max(1) - 1, x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

pub fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn fmt_set(indices: &[usize]) -> String {
    let items: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
    digits: usize,
}

impl Report {
    pub fn new(command: &str, seed: u64, digits: usize) -> Self {
        let mut r = Self {
            lines: Vec::new(),
            digits,
        };
        r.text("command", command);
        r.text("seed", seed);
        r
    }

    pub fn text(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        let v = fmt_num(value, self.digits);
        self.lines.push((key.to_string(), v));
    }

    pub fn rectangle(&mut self, key: &str, r: &Rectangle) {
        if r.is_empty() {
            self.text(key, "empty");
        } else {
            self.text(key, format!("rows={} cols={}", fmt_set(r.rows()), fmt_set(r.cols())));
        }
    }

    pub fn cells(&mut self, key: &str, cells: &[(usize, usize)]) {
        let items: Vec<String> = cells.iter().map(|(i, j)| format!("({i},{j})")).collect();
        self.text(key, format!("{{{}}}", items.join(",")));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(2.0 * 2f64.sqrt(), 12), "2.82842712475");
        assert_eq!(fmt_num(2.0, 12), "2");
        assert_eq!(fmt_num(0.0, 12), "0");
        assert_eq!(fmt_num(1.0 / 3.0, 3), "0.333");
    }

    #[test]
    fn stable_order() {
        let mut r = Report::new("norm", 7, 12);
        r.num("value", 1.5);
        assert_eq!(r.render(), "command: norm\nseed: 7\nvalue: 1.5\n");
    }
}
