//! Line-oriented circuit description.
//!
//! ```text
//! # comment
//! modes 6
//! seed 42
//! gate preserving 0 1 0.1 0.2 0.3 0.4
//! gate general 1 4 random time 0.5
//! dense time 2
//! block 0 2 0.1 0.2 0.3 0.4 0.5 0.6
//! block 3 5 random
//! end
//! layer nn preserving random
//! layer all general random time 0.25
//! ```
//!
//! `modes` must precede every gate record. `random` parameters are drawn
//! uniformly from `[0, π)` with a ChaCha8 stream seeded by `seed` (or a
//! command-line override), in record order. `time` defaults to 1.

use std::f64::consts::PI;
use std::fmt::Write as _;

use matchsim_core::fermiops::{all_pairs, nearest_neighbor_pairs, ModePair, PairBlock, PairFamily};
use matchsim_core::{Circuit, GateSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Explicit(Vec<f64>),
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerPattern {
    NearestNeighbor,
    AllPairs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockRecord {
    pub i: usize,
    pub j: usize,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Gate {
        family: PairFamily,
        i: usize,
        j: usize,
        params: Params,
        time: f64,
    },
    Dense {
        blocks: Vec<BlockRecord>,
        time: f64,
    },
    Layer {
        pattern: LayerPattern,
        family: PairFamily,
        time: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitConfig {
    pub n_modes: usize,
    pub seed: Option<u64>,
    pub records: Vec<Record>,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(pos),
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..pos],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct Cursor<'a, 't> {
    line: usize,
    end_column: usize,
    tokens: &'t [Token<'a>],
    pos: usize,
}

impl<'a, 't> Cursor<'a, 't> {
    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let column = self.tokens.get(self.pos).map_or(self.end_column, |t| t.column);
        ParseError::new(self.line, column, message)
    }

    fn err_prev(&self, message: impl Into<String>) -> ParseError {
        let column = self.tokens[self.pos - 1].column;
        ParseError::new(self.line, column, message)
    }

    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.text)
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| self.err_here(format!("expected {what}")))?;
        self.pos += 1;
        Ok(t.text)
    }

    fn usize(&mut self, what: &str) -> Result<usize, ParseError> {
        let t = self.next(what)?;
        t.parse().map_err(|_| self.err_prev(format!("expected {what}, found {t:?}")))
    }

    fn f64(&mut self, what: &str) -> Result<f64, ParseError> {
        let t = self.next(what)?;
        let v: f64 = t.parse().map_err(|_| self.err_prev(format!("expected {what}, found {t:?}")))?;
        if !v.is_finite() {
            return Err(self.err_prev(format!("{what} must be finite")));
        }
        Ok(v)
    }

    fn params(&mut self, count: usize) -> Result<Params, ParseError> {
        if self.peek() == Some("random") {
            self.pos += 1;
            return Ok(Params::Random);
        }
        (0..count).map(|_| self.f64("parameter")).collect::<Result<_, _>>().map(Params::Explicit)
    }

    fn time(&mut self) -> Result<f64, ParseError> {
        if self.peek() == Some("time") {
            self.pos += 1;
            return self.f64("time");
        }
        Ok(1.0)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(ParseError::new(self.line, t.column, format!("unexpected token {:?}", t.text))),
            None => Ok(()),
        }
    }
}

fn family(c: &mut Cursor<'_, '_>) -> Result<PairFamily, ParseError> {
    match c.next("gate family")? {
        "preserving" => Ok(PairFamily::Preserving),
        "general" => Ok(PairFamily::General),
        other => Err(c.err_prev(format!("unknown gate family {other:?}"))),
    }
}

fn family_arity(f: PairFamily) -> usize {
    match f {
        PairFamily::Preserving => 4,
        PairFamily::General => 6,
    }
}

fn pair(c: &mut Cursor<'_, '_>, n_modes: usize) -> Result<(usize, usize), ParseError> {
    let i = c.usize("mode index")?;
    let i_col = c.tokens[c.pos - 1].column;
    let j = c.usize("mode index")?;
    if i >= j {
        return Err(ParseError::new(c.line, i_col, format!("mode pair ({i}, {j}) must satisfy i < j")));
    }
    if j >= n_modes {
        return Err(c.err_prev(format!("mode {j} out of range for {n_modes} modes")));
    }
    Ok((i, j))
}

impl CircuitConfig {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut n_modes: Option<usize> = None;
        let mut seed = None;
        let mut records = Vec::new();
        let mut open_dense: Option<(usize, Vec<BlockRecord>, f64)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let tokens = tokenize(raw);
            if tokens.is_empty() {
                continue;
            }
            let mut c = Cursor {
                line,
                end_column: raw.chars().count() + 1,
                tokens: &tokens,
                pos: 0,
            };
            let keyword = c.next("keyword")?;
            let need_modes = |c: &Cursor<'_, '_>| n_modes.ok_or_else(|| c.err_prev("`modes` must come first"));

            if let Some((_, blocks, _)) = open_dense.as_mut() {
                match keyword {
                    "block" => {
                        let n = need_modes(&c)?;
                        let (i, j) = pair(&mut c, n)?;
                        if blocks.iter().any(|b| b.i == i && b.j == j) {
                            return Err(ParseError::new(line, tokens[1].column, format!("pair ({i}, {j}) repeated in dense layer")));
                        }
                        let params = c.params(6)?;
                        c.finish()?;
                        blocks.push(BlockRecord { i, j, params });
                    }
                    "end" => {
                        c.finish()?;
                        let (_, blocks, time) = open_dense.take().expect("open");
                        records.push(Record::Dense { blocks, time });
                    }
                    other => return Err(c.err_prev(format!("expected `block` or `end` inside dense layer, found {other:?}"))),
                }
                continue;
            }

            match keyword {
                "modes" => {
                    if n_modes.is_some() {
                        return Err(c.err_prev("`modes` given twice"));
                    }
                    let n = c.usize("mode count")?;
                    if n == 0 {
                        return Err(c.err_prev("mode count must be positive"));
                    }
                    c.finish()?;
                    n_modes = Some(n);
                }
                "seed" => {
                    if seed.is_some() {
                        return Err(c.err_prev("`seed` given twice"));
                    }
                    let t = c.next("seed")?;
                    seed = Some(t.parse().map_err(|_| c.err_prev(format!("expected seed, found {t:?}")))?);
                    c.finish()?;
                }
                "gate" => {
                    let n = need_modes(&c)?;
                    let family = family(&mut c)?;
                    let (i, j) = pair(&mut c, n)?;
                    let params = c.params(family_arity(family))?;
                    let time = c.time()?;
                    c.finish()?;
                    records.push(Record::Gate { family, i, j, params, time });
                }
                "dense" => {
                    need_modes(&c)?;
                    let time = c.time()?;
                    c.finish()?;
                    open_dense = Some((line, Vec::new(), time));
                }
                "layer" => {
                    need_modes(&c)?;
                    let pattern = match c.next("layer pattern")? {
                        "nn" => LayerPattern::NearestNeighbor,
                        "all" => LayerPattern::AllPairs,
                        other => return Err(c.err_prev(format!("unknown layer pattern {other:?}"))),
                    };
                    let family = family(&mut c)?;
                    if c.next("`random`")? != "random" {
                        return Err(c.err_prev("layer parameters must be `random`"));
                    }
                    let time = c.time()?;
                    c.finish()?;
                    records.push(Record::Layer { pattern, family, time });
                }
                "block" | "end" => return Err(c.err_prev(format!("`{keyword}` outside a dense layer"))),
                other => return Err(c.err_prev(format!("unknown keyword {other:?}"))),
            }
        }
        if let Some((line, _, _)) = open_dense {
            return Err(ParseError::new(line, 1, "dense layer is missing `end`"));
        }
        let n_modes = n_modes.ok_or_else(|| ParseError::new(text.lines().count().max(1), 1, "missing `modes`"))?;
        Ok(Self { n_modes, seed, records })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "modes {}", self.n_modes).unwrap();
        if let Some(seed) = self.seed {
            writeln!(s, "seed {seed}").unwrap();
        }
        let params = |p: &Params| match p {
            Params::Random => "random".to_string(),
            Params::Explicit(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        };
        let time = |t: f64| if t == 1.0 { String::new() } else { format!(" time {t}") };
        let family = |f: PairFamily| match f {
            PairFamily::Preserving => "preserving",
            PairFamily::General => "general",
        };
        for r in &self.records {
            match r {
                Record::Gate { family: f, i, j, params: p, time: t } => {
                    writeln!(s, "gate {} {i} {j} {}{}", family(*f), params(p), time(*t)).unwrap();
                }
                Record::Dense { blocks, time: t } => {
                    writeln!(s, "dense{}", time(*t)).unwrap();
                    for b in blocks {
                        writeln!(s, "block {} {} {}", b.i, b.j, params(&b.params)).unwrap();
                    }
                    writeln!(s, "end").unwrap();
                }
                Record::Layer { pattern, family: f, time: t } => {
                    let pat = match pattern {
                        LayerPattern::NearestNeighbor => "nn",
                        LayerPattern::AllPairs => "all",
                    };
                    writeln!(s, "layer {pat} {} random{}", family(*f), time(*t)).unwrap();
                }
            }
        }
        s
    }

    /// Materializes the circuit; `seed_override` replaces the file's seed.
    pub fn build(&self, seed_override: Option<u64>) -> matchsim_core::Result<Circuit> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_override.or(self.seed).unwrap_or(0));
        let mut draw = |p: &Params, k: usize| -> Vec<f64> {
            match p {
                Params::Explicit(v) => v.clone(),
                Params::Random => (0..k).map(|_| PI * rng.random::<f64>()).collect(),
            }
        };
        let mut c = Circuit::new(self.n_modes);
        for r in &self.records {
            match r {
                Record::Gate { family, i, j, params, time } => {
                    let v = draw(params, family_arity(*family));
                    c.push(pair_gate(*family, *i, *j, &v)?.with_time(*time))?;
                }
                Record::Dense { blocks, time } => {
                    let blocks = blocks
                        .iter()
                        .map(|b| {
                            let v = draw(&b.params, 6);
                            Ok(PairBlock {
                                pair: ModePair::new(b.i, b.j)?,
                                params: v.try_into().expect("six parameters"),
                            })
                        })
                        .collect::<matchsim_core::Result<Vec<_>>>()?;
                    c.push(GateSpec::dense_layer(blocks)?.with_time(*time))?;
                }
                Record::Layer { pattern, family, time } => {
                    let pairs = match pattern {
                        LayerPattern::NearestNeighbor => nearest_neighbor_pairs(self.n_modes),
                        LayerPattern::AllPairs => all_pairs(self.n_modes),
                    };
                    for p in pairs {
                        let v = draw(&Params::Random, family_arity(*family));
                        c.push(pair_gate(*family, p.i(), p.j(), &v)?.with_time(*time))?;
                    }
                }
            }
        }
        Ok(c)
    }

    /// A config with every parameter of `circuit` written out explicitly.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        use matchsim_core::GateKind;
        let records = circuit
            .gates()
            .iter()
            .map(|g| match &g.kind {
                GateKind::Preserving { pair, params } => Record::Gate {
                    family: PairFamily::Preserving,
                    i: pair.i(),
                    j: pair.j(),
                    params: Params::Explicit(params.to_vec()),
                    time: g.time,
                },
                GateKind::General { pair, params } => Record::Gate {
                    family: PairFamily::General,
                    i: pair.i(),
                    j: pair.j(),
                    params: Params::Explicit(params.to_vec()),
                    time: g.time,
                },
                GateKind::DenseLayer(blocks) => Record::Dense {
                    blocks: blocks
                        .iter()
                        .map(|b| BlockRecord {
                            i: b.pair.i(),
                            j: b.pair.j(),
                            params: Params::Explicit(b.params.to_vec()),
                        })
                        .collect(),
                    time: g.time,
                },
            })
            .collect();
        Self {
            n_modes: circuit.n_modes(),
            seed: None,
            records,
        }
    }
}

fn pair_gate(family: PairFamily, i: usize, j: usize, v: &[f64]) -> matchsim_core::Result<GateSpec> {
    match family {
        PairFamily::Preserving => GateSpec::preserving(i, j, v.try_into().expect("four parameters")),
        PairFamily::General => GateSpec::general(i, j, v.try_into().expect("six parameters")),
    }
}
