// The text and JSON system formats and the command dispatcher, in process.

use sailfree::cli::{parse_system, run, serialize_system, system_json};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("sailfree-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let file = dir.join("c1.txt");
    let path = file.to_str().unwrap();

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(["sailfree", "construct", "--type", "c1", "--k", "4", "--seed", "5", "--out", path], &mut out, &mut err);
    println!("construct exit {code}");
    let text = std::fs::read_to_string(&file)?;
    print!("{text}");

    let h = parse_system(&text)?;
    assert_eq!(parse_system(&serialize_system(&h))?, h);
    println!("json: {}", system_json(&h));

    out.clear();
    let code = run(["sailfree", "check", path, "--role", "extremal-3k+1"], &mut out, &mut err);
    print!("{}", String::from_utf8(out)?);
    println!("check exit {code}");

    let bad = dir.join("sail.txt");
    std::fs::write(&bad, "7 4\n0 1 2\n0 3 4\n0 5 6\n1 3 5\n")?;
    let mut out = Vec::new();
    let code = run(["sailfree", "check", bad.to_str().unwrap(), "--role", "extremal-3k+1"], &mut out, &mut err);
    print!("{}", String::from_utf8(out)?);
    println!("check exit {code}");

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
