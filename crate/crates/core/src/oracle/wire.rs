//! Newline-delimited JSON records exchanged with an external oracle.
//!
//! ```text
//! solver -> oracle   {"hello":{"n":2,"m":2}}
//! oracle -> solver   {"ready":true}
//! solver -> oracle   {"id":1,"x":[-1.2000000000000000e0,1.0000000000000000e0]}
//! oracle -> solver   {"id":1,"fvec":[-4.4,2.2]}
//!                    {"id":1,"error":"message"}
//! ```
//!
//! Query coordinates are written with 17 significant digits so they parse
//! back to the identical `f64`.

use serde_json::Value;
use std::io::{self, BufRead, Write};

pub fn hello(n: usize, m: usize) -> String {
    format!("{{\"hello\":{{\"n\":{n},\"m\":{m}}}}}")
}

pub fn ready() -> String {
    "{\"ready\":true}".to_string()
}

pub fn request(id: u64, x: &[f64]) -> String {
    let mut s = format!("{{\"id\":{id},\"x\":[");
    for (i, v) in x.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{v:.16e}"));
    }
    s.push_str("]}");
    s
}

pub fn response(id: u64, fvec: &[f64]) -> String {
    let mut s = format!("{{\"id\":{id},\"fvec\":[");
    for (i, v) in fvec.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{v:.16e}"));
    }
    s.push_str("]}");
    s
}

pub fn error_response(id: u64, message: &str) -> String {
    let message = serde_json::Value::from(message);
    format!("{{\"id\":{id},\"error\":{message}}}")
}

/// `Ok(())` iff the line is `{"ready": true}`.
pub fn parse_ready(line: &str) -> Result<(), String> {
    let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("malformed handshake reply: {e}"))?;
    match v.get("ready") {
        Some(Value::Bool(true)) => Ok(()),
        _ => Err(format!("unexpected handshake reply `{}`", line.trim())),
    }
}

/// Parses `{"hello":{"n":..,"m":..}}`.
pub fn parse_hello(line: &str) -> Result<(usize, usize), String> {
    let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("malformed hello: {e}"))?;
    let h = v.get("hello").ok_or("missing `hello`")?;
    let dim = |k: &str| {
        h.get(k)
            .and_then(Value::as_u64)
            .map(|d| d as usize)
            .ok_or_else(|| format!("hello lacks `{k}`"))
    };
    Ok((dim("n")?, dim("m")?))
}

/// Parses a request line into `(id, x)`.
pub fn parse_request(line: &str) -> Result<(u64, Vec<f64>), String> {
    let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("malformed request: {e}"))?;
    let id = v.get("id").and_then(Value::as_u64).ok_or("request lacks integer `id`")?;
    let x = float_array(v.get("x").ok_or("request lacks `x`")?)?;
    Ok((id, x))
}

/// Parses a response to request `id`, returning the vector of `F` values.
pub fn parse_response(line: &str, id: u64) -> Result<Vec<f64>, String> {
    let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("malformed response: {e}"))?;
    let got = v.get("id").and_then(Value::as_u64).ok_or("response lacks integer `id`")?;
    if got != id {
        return Err(format!("response id {got} does not match request id {id}"));
    }
    if let Some(err) = v.get("error") {
        let msg = err.as_str().map(str::to_owned).unwrap_or_else(|| err.to_string());
        return Err(format!("oracle reported error: {msg}"));
    }
    float_array(v.get("fvec").ok_or("response lacks `fvec`")?)
}

fn float_array(v: &Value) -> Result<Vec<f64>, String> {
    let arr = v.as_array().ok_or("expected an array of numbers")?;
    arr.iter()
        .map(|e| e.as_f64().ok_or_else(|| format!("`{e}` is not a finite number")))
        .collect()
}

/// Runs the oracle side of the protocol until the input closes.
///
/// `f` returns `Err` to send an error record for that query.
pub fn serve<R, W, F>(input: R, mut output: W, mut f: F) -> io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(&[f64]) -> Result<Vec<f64>, String>,
{
    let mut lines = input.lines();
    let Some(first) = lines.next() else {
        return Ok(());
    };
    parse_hello(&first?).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    writeln!(output, "{}", ready())?;
    output.flush()?;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match parse_request(&line) {
            Ok((id, x)) => match f(&x) {
                Ok(fvec) => response(id, &fvec),
                Err(msg) => error_response(id, &msg),
            },
            Err(msg) => error_response(0, &msg),
        };
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(())
}
