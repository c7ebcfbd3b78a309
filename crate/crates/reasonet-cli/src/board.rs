//! Sudoku board files: an n²×n² grid of whitespace-separated tokens, each a
//! 1-based digit or "." for a blank.

use std::collections::BTreeMap;

use reasonet_core::logic::sudoku_atom;
use reasonet_core::propagation::Deduction;

use crate::error::CliError;

/// Parses a board file into the start set of (r0, r1, c0, c1, value) givens
/// with 0-based values.
pub fn parse_board(text: &str, n: usize) -> Result<Vec<(usize, usize, usize, usize, usize)>, CliError> {
    let side = n * n;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != side * side {
        return Err(CliError::parse(format!(
            "board needs {} tokens for n = {n}, got {}",
            side * side,
            tokens.len()
        )));
    }
    let mut givens = Vec::new();
    for (cell, tok) in tokens.iter().enumerate() {
        if *tok == "." {
            continue;
        }
        let value: usize = tok
            .parse()
            .map_err(|_| CliError::parse(format!("bad board token '{tok}'")))?;
        if value == 0 || value > side {
            return Err(CliError::parse(format!(
                "board value {value} out of range 1..={side}"
            )));
        }
        let (r, c) = (cell / side, cell % side);
        givens.push((r / n, r % n, c / n, c % n, value - 1));
    }
    Ok(givens)
}

/// Renders deduced atom truth values as a board: decided cells show their
/// 1-based digit, undecided cells ".". Returns the text and whether every
/// cell is fully determined.
pub fn render_board(n: usize, deduced: &BTreeMap<String, Deduction>) -> (String, bool) {
    let side = n * n;
    let mut out = String::new();
    let mut complete = true;
    for r in 0..side {
        let mut line = String::new();
        for c in 0..side {
            if c > 0 {
                line.push(' ');
            }
            let cell = (r / n, r % n, c / n, c % n);
            let trues: Vec<usize> = (0..side)
                .filter(|&i| deduced[&sudoku_atom(n, cell, i)] == Deduction::True)
                .collect();
            let open =
                (0..side).any(|i| deduced[&sudoku_atom(n, cell, i)] == Deduction::Unknown);
            match trues.as_slice() {
                [v] if !open => line.push_str(&(v + 1).to_string()),
                _ => {
                    line.push('.');
                    complete = false;
                }
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    (out, complete)
}
