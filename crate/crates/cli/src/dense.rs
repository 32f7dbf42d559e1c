//! Plain 0/1 text matrices: one row per line, entries optionally separated
//! by whitespace or commas. Lines starting with `#` are ignored.

use evoldpc::ParityCheckMatrix;

pub fn parse_dense(text: &str) -> Result<ParityCheckMatrix, String> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .chars()
            .filter(|ch| !ch.is_whitespace() && *ch != ',')
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(format!("line {}: unexpected character `{other}`", i + 1)),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format!("line {}: row has {} entries, expected {}", i + 1, row.len(), first.len()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no matrix rows found".into());
    }
    ParityCheckMatrix::from_dense(&rows).map_err(|e| e.to_string())
}

pub fn to_dense_text(h: &ParityCheckMatrix) -> String {
    let mut out = String::with_capacity(h.m() * (2 * h.n() + 1));
    for row in h.to_dense() {
        let line: Vec<&str> = row.iter().map(|&b| if b == 1 { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let h = ParityCheckMatrix::new(2, 3, [(0, 0), (0, 2), (1, 1)]).unwrap();
        let text = to_dense_text(&h);
        assert_eq!(text, "1 0 1\n0 1 0\n");
        assert_eq!(parse_dense(&text).unwrap(), h);
        assert_eq!(parse_dense("# c\n101\n010\n").unwrap(), h);
    }

    #[test]
    fn errors_name_line() {
        assert!(parse_dense("1 0\n1 2\n").unwrap_err().contains("line 2"));
        assert!(parse_dense("1 0\n1\n").unwrap_err().contains("line 2"));
        assert!(parse_dense("").is_err());
    }
}
