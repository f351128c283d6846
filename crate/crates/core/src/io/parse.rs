//! Parsers for the published benchmark layouts. Annotated samples of
//! both layouts live under `data/samples/` in the repository root.

use super::RawBenchmark;
use crate::model::{Load, Money};
use crate::{Error, Result};

/// Whitespace token stream that tracks line numbers for diagnostics.
struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                items.push((i + 1, tok));
            }
        }
        Tokens { items, pos: 0 }
    }

    fn last_line(&self) -> usize {
        self.items.last().map(|&(l, _)| l).unwrap_or(0)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.items.get(self.pos) {
            Some(&(line, tok)) => {
                self.pos += 1;
                Ok((line, tok))
            }
            None => Err(Error::Parse {
                line: self.last_line(),
                msg: format!("missing {what}"),
            }),
        }
    }

    fn int(&mut self, what: &str) -> Result<i64> {
        let (line, tok) = self.next(what)?;
        tok.parse::<f64>()
            .ok()
            .filter(|x| x.fract() == 0.0)
            .map(|x| x as i64)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected integer for {what}, got `{tok}`"),
            })
    }

    fn num(&mut self, what: &str) -> Result<f64> {
        let (line, tok) = self.next(what)?;
        tok.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("expected number for {what}, got `{tok}`"),
        })
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.next(what)?;
        let v = tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("expected count for {what}, got `{tok}`"),
        })?;
        if v == 0 {
            return Err(Error::Parse { line, msg: format!("{what} must be positive") });
        }
        Ok(v)
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

/// Parses the Prodhon-derived layout:
///
/// ```text
/// n                      customer count
/// m                      depot count
/// x y   (m lines)        depot coordinates
/// x y   (n lines)        customer coordinates
/// Q2                     second-echelon vehicle capacity
/// cap   (m lines)        depot capacities
/// d     (n lines)        customer demands
/// f     (m lines)        depot opening costs
/// route_cost             per-route fixed cost (both echelons)
/// [0|1]                  optional cost-type flag, ignored
/// ```
///
/// The main depot sits at the origin; the first-echelon vehicle
/// capacity is the maximum depot capacity times 1.5.
pub fn parse_prodhon(text: &str) -> Result<RawBenchmark> {
    let mut t = Tokens::new(text);
    let n = t.count("customer count")?;
    let m = t.count("depot count")?;
    let mut satellite_coords = Vec::with_capacity(m);
    for i in 0..m {
        let x = t.num(&format!("depot {i} x"))?;
        let y = t.num(&format!("depot {i} y"))?;
        satellite_coords.push((x, y));
    }
    let mut customer_coords = Vec::with_capacity(n);
    for i in 0..n {
        let x = t.num(&format!("customer {i} x"))?;
        let y = t.num(&format!("customer {i} y"))?;
        customer_coords.push((x, y));
    }
    let se_capacity: Load = t.int("vehicle capacity")?;
    let mut satellite_capacities = Vec::with_capacity(m);
    for i in 0..m {
        satellite_capacities.push(t.int(&format!("depot {i} capacity"))?);
    }
    let mut demands = Vec::with_capacity(n);
    for i in 0..n {
        demands.push(t.int(&format!("customer {i} demand"))?);
    }
    let mut satellite_opening_costs: Vec<Money> = Vec::with_capacity(m);
    for i in 0..m {
        satellite_opening_costs.push(t.int(&format!("depot {i} opening cost"))?);
    }
    let route_cost: Money = t.int("route fixed cost")?;
    if !t.done() {
        let (line, tok) = t.next("cost-type flag")?;
        if tok != "0" && tok != "1" {
            return Err(Error::Parse {
                line,
                msg: format!("unexpected trailing token `{tok}`"),
            });
        }
        if !t.done() {
            let (line, tok) = t.next("end of file")?;
            return Err(Error::Parse { line, msg: format!("unexpected trailing token `{tok}`") });
        }
    }
    let max_cap = *satellite_capacities.iter().max().unwrap();
    Ok(RawBenchmark {
        name: String::new(),
        depot_coord: (0.0, 0.0),
        satellite_coords,
        satellite_capacities,
        satellite_opening_costs,
        customer_coords,
        demands,
        fe_capacity: max_cap * 3 / 2,
        se_capacity,
        fe_fixed_cost: route_cost,
        se_fixed_cost: route_cost,
    })
}

/// Parses the Nguyen layout (single main depot, uncapacitated
/// satellites with opening costs):
///
/// ```text
/// n                      customer count
/// m                      satellite count
/// x y                    main depot coordinate
/// Q1                     first-echelon vehicle capacity
/// Q2                     second-echelon vehicle capacity
/// f1 f2                  FE / SE vehicle fixed costs
/// x y cost  (m lines)    satellite coordinate and opening cost
/// x y d     (n lines)    customer coordinate and demand
/// ```
pub fn parse_nguyen(text: &str) -> Result<RawBenchmark> {
    let mut t = Tokens::new(text);
    let n = t.count("customer count")?;
    let m = t.count("satellite count")?;
    let depot_coord = (t.num("main depot x")?, t.num("main depot y")?);
    let fe_capacity: Load = t.int("first-echelon capacity")?;
    let se_capacity: Load = t.int("second-echelon capacity")?;
    let fe_fixed_cost: Money = t.int("fe vehicle fixed cost")?;
    let se_fixed_cost: Money = t.int("se vehicle fixed cost")?;
    let mut satellite_coords = Vec::with_capacity(m);
    let mut satellite_opening_costs = Vec::with_capacity(m);
    for i in 0..m {
        let x = t.num(&format!("satellite {i} x"))?;
        let y = t.num(&format!("satellite {i} y"))?;
        satellite_coords.push((x, y));
        satellite_opening_costs.push(t.int(&format!("satellite {i} opening cost"))?);
    }
    let mut customer_coords = Vec::with_capacity(n);
    let mut demands = Vec::with_capacity(n);
    for i in 0..n {
        let x = t.num(&format!("customer {i} x"))?;
        let y = t.num(&format!("customer {i} y"))?;
        customer_coords.push((x, y));
        demands.push(t.int(&format!("customer {i} demand"))?);
    }
    if !t.done() {
        let (line, tok) = t.next("end of file")?;
        return Err(Error::Parse { line, msg: format!("unexpected trailing token `{tok}`") });
    }
    // Satellites carry no capacity in this set; total demand acts as a
    // non-binding bound.
    let total: Load = demands.iter().sum();
    Ok(RawBenchmark {
        name: String::new(),
        depot_coord,
        satellite_coords,
        satellite_capacities: vec![total; m],
        satellite_opening_costs,
        customer_coords,
        demands,
        fe_capacity,
        se_capacity,
        fe_fixed_cost,
        se_fixed_cost,
    })
}
