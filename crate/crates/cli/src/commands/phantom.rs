use bintomo::io::binary_to_pgm;
use bintomo::phantom::make_phantom;

use crate::args::PhantomArgs;
use crate::failure::Failure;
use crate::files::save_pgm;

pub fn run(args: &PhantomArgs) -> Result<(), Failure> {
    let img = make_phantom(args.name, args.n)?;
    save_pgm(&args.out, &binary_to_pgm(&img))?;
    println!("{} {}×{}: {} upper pixels -> {}", args.name, args.n, args.n, img.count_upper(), args.out.display());
    Ok(())
}
