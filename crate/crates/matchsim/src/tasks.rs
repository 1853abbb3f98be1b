//! Task input formats: PBM bitmaps, probability tables and edge lists.

use matchsim_core::oracle::WeightedGraph;
use matchsim_core::Bits;

use crate::error::ParseError;

/// Tolerance on the total mass of a probability table.
pub const PDF_SUM_TOLERANCE: f64 = 1e-6;

/// Largest number of qubits a probability table may span.
pub const PDF_MAX_BITS: usize = 14;

/// Whitespace-separated tokens with their 1-based positions, `#` comments removed.
fn tokens(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().flat_map(|(li, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        content.split_whitespace().map(move |tok| {
            let offset = tok.as_ptr() as usize - content.as_ptr() as usize;
            (li + 1, content[..offset].chars().count() + 1, tok)
        })
    })
}

/// A plain PBM (`P1`) bitmap flattened row-major; `1` is black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub bits: Bits,
}

pub fn parse_pbm(text: &str) -> Result<Bitmap, ParseError> {
    let mut toks = tokens(text);
    let last = text.lines().count().max(1);
    let eof = |what: &str| ParseError::new(last, 1, format!("unexpected end of file, expected {what}"));

    let (l, c, magic) = toks.next().ok_or_else(|| eof("`P1`"))?;
    if magic != "P1" {
        return Err(ParseError::new(l, c, format!("expected `P1`, found {magic:?}")));
    }
    let mut dim = |what: &str| -> Result<usize, ParseError> {
        let (l, c, t) = toks.next().ok_or_else(|| eof(what))?;
        match t.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(ParseError::new(l, c, format!("expected positive {what}, found {t:?}"))),
        }
    };
    let width = dim("width")?;
    let height = dim("height")?;
    let total = width.checked_mul(height).ok_or_else(|| eof("a smaller image"))?;

    let mut bits = Vec::with_capacity(total);
    for (l, c, t) in toks {
        for (k, ch) in t.chars().enumerate() {
            match ch {
                '0' | '1' if bits.len() < total => bits.push(ch == '1'),
                '0' | '1' => return Err(ParseError::new(l, c + k, "more pixels than width × height")),
                _ => return Err(ParseError::new(l, c + k, format!("invalid pixel {ch:?}"))),
            }
        }
    }
    if bits.len() < total {
        return Err(eof(&format!("{total} pixels, found {}", bits.len())));
    }
    Ok(Bitmap {
        width,
        height,
        bits: Bits::new(bits),
    })
}

/// A target distribution over `n_bits` outcomes, dense and indexed by [`Bits::to_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pdf {
    pub n_bits: usize,
    pub probabilities: Vec<f64>,
}

pub fn parse_pdf(text: &str) -> Result<Pdf, ParseError> {
    let mut n_bits = None;
    let mut probabilities: Vec<f64> = Vec::new();
    let mut seen: Vec<bool> = Vec::new();
    let mut sum = 0.0;
    let mut line_toks: Vec<(usize, usize, &str)> = Vec::new();
    let mut all = tokens(text).peekable();

    while let Some(first) = all.next() {
        line_toks.clear();
        line_toks.push(first);
        while let Some(&t) = all.peek() {
            if t.0 != first.0 {
                break;
            }
            line_toks.push(t);
            all.next();
        }
        let (line, col, bits_tok) = line_toks[0];
        let Some(&(_, pcol, prob_tok)) = line_toks.get(1) else {
            return Err(ParseError::new(line, col + bits_tok.len(), "expected probability"));
        };
        if let Some(&(_, xcol, extra)) = line_toks.get(2) {
            return Err(ParseError::new(line, xcol, format!("unexpected token {extra:?}")));
        }
        let bits: Bits = bits_tok
            .parse()
            .map_err(|e: matchsim_core::measure::BitsParseError| ParseError::new(line, col + e.position, format!("invalid bit {:?}", e.found)))?;
        let k = *n_bits.get_or_insert(bits.len());
        if bits.len() != k {
            return Err(ParseError::new(line, col, format!("bitstring has length {}, expected {k}", bits.len())));
        }
        if k == 0 || k > PDF_MAX_BITS {
            return Err(ParseError::new(line, col, format!("bitstring length must be in 1..={PDF_MAX_BITS}")));
        }
        if probabilities.is_empty() {
            probabilities = vec![0.0; 1 << k];
            seen = vec![false; 1 << k];
        }
        let p: f64 = prob_tok
            .parse()
            .ok()
            .filter(|p: &f64| p.is_finite() && *p >= 0.0)
            .ok_or_else(|| ParseError::new(line, pcol, format!("expected nonnegative probability, found {prob_tok:?}")))?;
        let idx = bits.to_index();
        if seen[idx] {
            return Err(ParseError::new(line, col, format!("duplicate outcome {bits_tok}")));
        }
        seen[idx] = true;
        probabilities[idx] = p;
        sum += p;
    }
    let n_bits = n_bits.ok_or_else(|| ParseError::new(1, 1, "empty distribution"))?;
    if (sum - 1.0).abs() > PDF_SUM_TOLERANCE {
        return Err(ParseError::new(text.lines().count().max(1), 1, format!("probabilities sum to {sum}, expected 1")));
    }
    Ok(Pdf { n_bits, probabilities })
}

/// Edge list `i j weight`; the node count is one past the largest index.
pub fn parse_edges(text: &str) -> Result<WeightedGraph, ParseError> {
    let mut edges = Vec::new();
    let mut last_line = 1;
    let mut toks = tokens(text).peekable();
    while let Some((line, col, first)) = toks.next() {
        last_line = line;
        let mut fields = vec![(col, first)];
        while let Some(&(l, c, t)) = toks.peek() {
            if l != line {
                break;
            }
            fields.push((c, t));
            toks.next();
        }
        if fields.len() != 3 {
            let c = fields.get(3).map_or(col, |f| f.0);
            return Err(ParseError::new(line, c, "expected `i j weight`"));
        }
        let node = |(c, t): (usize, &str)| t.parse::<usize>().map_err(|_| ParseError::new(line, c, format!("expected node index, found {t:?}")));
        let i = node(fields[0])?;
        let j = node(fields[1])?;
        if i == j {
            return Err(ParseError::new(line, col, "self-loop"));
        }
        let (wc, wt) = fields[2];
        let w: f64 = wt
            .parse()
            .ok()
            .filter(|w: &f64| w.is_finite())
            .ok_or_else(|| ParseError::new(line, wc, format!("expected weight, found {wt:?}")))?;
        edges.push((i.min(j), i.max(j), w));
    }
    let n = edges.iter().map(|e| e.1 + 1).max().ok_or_else(|| ParseError::new(last_line, 1, "empty edge list"))?;
    WeightedGraph::new(n, edges).map_err(|e| ParseError::new(last_line, 1, e.to_string()))
}
