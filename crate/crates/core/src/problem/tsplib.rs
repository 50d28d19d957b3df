//! Reader for symmetric EUC_2D instances in the TSPLIB text format.

use super::{Direction, ProblemInstance, ProblemKind, WeightMatrix};
use crate::error::{Error, Result};

/// Optimal tour lengths of well-known TSPLIB instances.
const OPTIMA: &[(&str, i64)] = &[
    ("eil51", 426),
    ("berlin52", 7542),
    ("st70", 675),
    ("eil76", 538),
    ("pr76", 108159),
    ("kroA100", 21282),
    ("kroB100", 22141),
    ("kroC100", 20749),
    ("kroD100", 21294),
    ("kroE100", 22068),
    ("rd100", 7910),
    ("eil101", 629),
    ("lin105", 14379),
];

/// Known optimal tour length for a TSPLIB instance name.
pub fn known_optimum(name: &str) -> Option<i64> {
    OPTIMA.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
}

/// TSPLIB `nint`: Euclidean distance rounded half-up.
pub fn euc_2d(a: (f64, f64), b: (f64, f64)) -> i64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as i64
}

/// Builds a TSP instance from planar coordinates using EUC_2D distances.
pub fn euclidean_instance(name: &str, coords: &[(f64, f64)]) -> Result<ProblemInstance> {
    let n = coords.len();
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = euc_2d(coords[i], coords[j]);
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    let matrix = WeightMatrix::new(n, n, Direction::Minimize, entries)?;
    let mut instance = ProblemInstance::new(name, ProblemKind::Tsp, vec![matrix])?;
    instance.known_optimum = known_optimum(name).map(|v| vec![v as f64]);
    Ok(instance)
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses a TSPLIB file with `TYPE: TSP`, `EDGE_WEIGHT_TYPE: EUC_2D` and a
/// `NODE_COORD_SECTION` terminated by `EOF`.
pub fn parse_tsplib(text: &[u8]) -> Result<ProblemInstance> {
    let text = std::str::from_utf8(text).map_err(|e| parse_error(0, format!("invalid UTF-8: {e}")))?;
    let mut name = None;
    let mut dimension = None;
    let mut kind_seen = false;
    let mut weight_type_seen = false;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut in_coords = false;
    let mut last_line = 0;

    for (no, line) in lines.by_ref() {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            in_coords = true;
            break;
        }
        if line == "EOF" {
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(parse_error(no, format!("expected `KEY : VALUE`, found `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "NAME" => name = Some(value.to_string()),
            "TYPE" => {
                if value != "TSP" {
                    return Err(parse_error(no, format!("unsupported TYPE `{value}`")));
                }
                kind_seen = true;
            }
            "DIMENSION" => {
                let d = value
                    .parse::<usize>()
                    .map_err(|_| parse_error(no, format!("invalid DIMENSION `{value}`")))?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(parse_error(no, format!("unsupported EDGE_WEIGHT_TYPE `{value}`")));
                }
                weight_type_seen = true;
            }
            "NODE_COORD_TYPE" | "DISPLAY_DATA_TYPE" if value != "TWOD_COORDS" && value != "COORD_DISPLAY" => {
                return Err(parse_error(no, format!("unsupported {key} `{value}`")));
            }
            _ => {}
        }
    }

    if !in_coords {
        return Err(parse_error(last_line, "missing NODE_COORD_SECTION"));
    }
    if !kind_seen {
        return Err(parse_error(last_line, "missing `TYPE: TSP`"));
    }
    if !weight_type_seen {
        return Err(parse_error(last_line, "missing `EDGE_WEIGHT_TYPE: EUC_2D`"));
    }
    let dimension = dimension.ok_or_else(|| parse_error(last_line, "missing DIMENSION"))?;

    let mut coords: Vec<Option<(f64, f64)>> = vec![None; dimension];
    let mut count = 0;
    let mut saw_eof = false;
    for (no, line) in lines {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            saw_eof = true;
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_error(no, format!("expected `id x y`, found `{line}`")));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| parse_error(no, format!("invalid node id `{}`", fields[0])))?;
        let x: f64 = fields[1]
            .parse()
            .map_err(|_| parse_error(no, format!("invalid x coordinate `{}`", fields[1])))?;
        let y: f64 = fields[2]
            .parse()
            .map_err(|_| parse_error(no, format!("invalid y coordinate `{}`", fields[2])))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_error(no, "non-finite coordinate"));
        }
        if id == 0 || id > dimension {
            return Err(parse_error(no, format!("node id {id} outside 1..={dimension}")));
        }
        if coords[id - 1].replace((x, y)).is_some() {
            return Err(parse_error(no, format!("duplicate node id {id}")));
        }
        count += 1;
    }
    if !saw_eof {
        return Err(parse_error(last_line + 1, "missing EOF"));
    }
    if count != dimension {
        return Err(parse_error(last_line, format!("expected {dimension} nodes, found {count}")));
    }
    let coords: Vec<(f64, f64)> = coords.into_iter().flatten().collect();
    let name = name.unwrap_or_else(|| "unnamed".to_string());
    euclidean_instance(&name, &coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(nodes: &str) -> String {
        let n = nodes.lines().filter(|l| !l.trim().is_empty()).count();
        format!("NAME : tiny\nTYPE : TSP\nDIMENSION : {n}\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n{nodes}EOF\n")
    }

    #[test]
    fn three_four_five() {
        let inst = parse_tsplib(file("1 0 0\n2 3 4\n").as_bytes()).unwrap();
        assert_eq!(inst.objectives[0].get(0, 1), 5);
        assert_eq!(inst.name, "tiny");
        assert!(inst.objectives[0].is_symmetric_zero_diagonal());
    }

    #[test]
    fn rounds_half_up() {
        let inst = parse_tsplib(file("1 0 0\n2 0 1.4\n3 0 2.5\n").as_bytes()).unwrap();
        assert_eq!(inst.objectives[0].get(0, 1), 1);
        assert_eq!(inst.objectives[0].get(0, 2), 3);
    }

    #[test]
    fn registry() {
        assert_eq!(known_optimum("kroD100"), Some(21294));
        assert_eq!(known_optimum("nope"), None);
    }

    #[test]
    fn rejects_other_weight_types() {
        let text = "NAME: x\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: GEO\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n";
        match parse_tsplib(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("GEO"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_coordinates() {
        match parse_tsplib(file("1 0 0\n2 zero 4\n").as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn requires_eof() {
        let text = "NAME: x\nTYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n";
        assert!(matches!(parse_tsplib(text.as_bytes()), Err(Error::Parse { line: 8, .. })));
    }

    #[test]
    fn node_count_must_match() {
        let text = "NAME: x\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n";
        assert!(parse_tsplib(text.as_bytes()).is_err());
    }
}
