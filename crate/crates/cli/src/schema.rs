pub const SCHEMA: &str = "\
ATOMIC VARIFOLD FILE
  header: varifold-atoms v1 n=<n> d=<d> count=<N> [lo=<a_1,..,a_n> hi=<b_1,..,b_n>]
  record: x_1 ... x_n | b_11 ... b_1n ; ... ; b_d1 ... b_dn | m
          position, orthonormal basis rows of the tangent plane, mass
  lo/hi:  the domain box; the padded bounding box of the atoms when absent

DISCRETE VARIFOLD FILE
  header: varifold-grid v1 n=<n> d=<d> h=<h> origin=<o_1,..,o_n> counts=<c_1,..,c_n> cells=<K>
  record: i_1 ... i_n | b_11 ... b_1n ; ... | m [| degenerate]
          cell index, mean plane basis, cell mass, flag for a tied mean plane

  Floats use the shortest representation that reads back to the same value.
  All files use `.` as the decimal point and `\\n` line endings.

firstvar CSV
  kind,cell,axis,density,area,contribution
    kind:    internal | boundary
    cell:    space-separated index of the lower cell of the face
    axis:    face normal axis, 0-based
    density: |(m+/|K|) P+ e_k - (m-/|K|) P- e_k|
  followed by internal_total, boundary_total and total rows (value in the last column)

energy CSV
  index,x1..xn,energy
    E_alpha(x_i, P_i, V) at every atom

tangent CSV
  index,x1..xn,basis,energy,spectral_gap,degenerate,angle_error_deg
    basis:           space-separated rows, `;` between rows
    energy:          minimum of E_alpha over planes
    angle_error_deg: angle to the atom's own plane; empty for explicit --points

regularity CSV
  delta,alpha,beta_cut,c1,c2,integrated_energy

sweep CSV
  delta,alpha,first_variation,scaled_first_variation,integrated_energy,c1,c2
    scaled_first_variation = delta * first_variation
";
