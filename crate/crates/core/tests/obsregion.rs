use heatobs::obsregion::{build_region, Placement};
use heatobs::{Error, GridSpec};

#[test]
fn one_dimensional_lattice_count() {
    let spec = GridSpec::new(1, 128, 4.0).unwrap();
    let region = build_region(&spec, 1.0, 0.25, Placement::Centered).unwrap();
    assert_eq!(region.num_cubes(), 8);
    assert_eq!(region.cells_per_cube(), 16);
    // cells strictly inside the ball: |k|/16 < 1/4, so |k| <= 3
    assert_eq!(region.thickness(), 7.0 / 16.0);
    let hits = region.mask().values().iter().filter(|&&v| v > 0.0).count();
    assert_eq!(hits, 8 * 7);
}

#[test]
fn two_dimensional_disc_count() {
    let spec = GridSpec::new(2, 64, 4.0).unwrap();
    let region = build_region(&spec, 1.0, 0.25, Placement::Centered).unwrap();
    assert_eq!(region.num_cubes(), 64);
    // lattice points with a² + b² < 4
    assert_eq!(region.thickness(), 9.0 / 64.0);
}

#[test]
fn cube_masks_partition_the_box() {
    let spec = GridSpec::new(2, 32, 2.0).unwrap();
    let region = build_region(&spec, 1.0, 0.25, Placement::Centered).unwrap();
    let mut cover = vec![0.0; spec.len()];
    for j in 0..region.num_cubes() {
        for (c, v) in cover.iter_mut().zip(region.cube_mask(j).unwrap().values()) {
            *c += v;
        }
    }
    assert!(cover.iter().all(|&c| c == 1.0));
}

#[test]
fn jittered_balls_stay_in_their_cubes() {
    let spec = GridSpec::new(2, 64, 4.0).unwrap();
    let a = build_region(&spec, 1.0, 0.25, Placement::Jittered(3)).unwrap();
    let b = build_region(&spec, 1.0, 0.25, Placement::Jittered(3)).unwrap();
    assert_eq!(a.centers(), b.centers());
    for j in 0..a.num_cubes() {
        let ball = a.ball_mask(j, a.radius()).unwrap();
        let cube = a.cube_mask(j).unwrap();
        for (x, y) in ball.values().iter().zip(cube.values()) {
            assert!(*x <= *y);
        }
    }
    let c = build_region(&spec, 1.0, 0.25, Placement::Jittered(4)).unwrap();
    assert_ne!(a.centers(), c.centers());
}

#[test]
fn overlap_of_enlarged_balls() {
    let spec = GridSpec::new(1, 128, 4.0).unwrap();
    let region = build_region(&spec, 1.0, 0.25, Placement::Centered).unwrap();
    assert_eq!(region.overlap_multiplicity(0.5), 1);
    assert_eq!(region.overlap_multiplicity(1.0), 2);
    assert_eq!(region.overlap_multiplicity(1.01), 3);
}

#[test]
fn geometry_errors() {
    let spec = GridSpec::new(1, 128, 4.0).unwrap();
    assert!(matches!(build_region(&spec, 3.0, 0.25, Placement::Centered), Err(Error::InvalidGeometry(_))));
    assert!(matches!(build_region(&spec, 1.0, 0.6, Placement::Centered), Err(Error::InvalidGeometry(_))));
    assert!(matches!(
        build_region(&spec, 1.0, 0.05, Placement::Centered),
        Err(Error::ResolutionTooCoarse { .. })
    ));
    let small = GridSpec::new(1, 64, 2.0).unwrap();
    let region = build_region(&small, 1.0, 0.25, Placement::Centered).unwrap();
    assert!(matches!(region.check_embedding(), Err(Error::InvalidGeometry(_))));
    let region = build_region(&spec, 0.5, 0.125, Placement::Centered).unwrap();
    region.check_embedding().unwrap();
}
