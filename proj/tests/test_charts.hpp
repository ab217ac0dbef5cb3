// Shared chart builders for the test and acceptance suites.
#pragma once

#include <memory>

#include "platehom/chart.hpp"

namespace charts {

using namespace platehom;

// kappa = 0, kappa_n = 1, length 1, s in (-1/2, 1/2), tangent e1.
inline ChartSpec cylinder() {
  ChartSpec spec;
  CurvaturePiece p;
  p.t_lo = 0.0;
  p.t_hi = 1.0;
  p.kappa = Poly::constant(0.0);
  p.kappa_n = Poly::constant(1.0);
  p.kind = PieceKind::Cylindrical;
  p.direction = Direction::rational(1, 0);
  spec.pieces = {p};
  spec.s_lo = -0.5;
  spec.s_hi = 0.5;
  return spec;
}

// kappa = 1, kappa_n = 1, length 1, s in (-1/4, 1/4).
inline ChartSpec cone() {
  ChartSpec spec;
  CurvaturePiece p;
  p.t_lo = 0.0;
  p.t_hi = 1.0;
  p.kappa = Poly::constant(1.0);
  p.kappa_n = Poly::constant(1.0);
  p.kind = PieceKind::Conical;
  spec.pieces = {p};
  spec.s_lo = -0.25;
  spec.s_hi = 0.25;
  return spec;
}

// flat [0,0.3], cylindrical [0.3,0.65] along e1, conical [0.65,1].
inline ChartSpec mixed() {
  ChartSpec spec;
  CurvaturePiece flat;
  flat.t_lo = 0.0;
  flat.t_hi = 0.3;
  flat.kappa = Poly::constant(0.0);
  flat.kappa_n = Poly::constant(0.0);
  flat.kind = PieceKind::Flat;
  CurvaturePiece cyl;
  cyl.t_lo = 0.3;
  cyl.t_hi = 0.65;
  cyl.kappa = Poly::constant(0.0);
  cyl.kappa_n = Poly::constant(1.0);
  cyl.kind = PieceKind::Cylindrical;
  cyl.direction = Direction::rational(1, 0);
  CurvaturePiece con;
  con.t_lo = 0.65;
  con.t_hi = 1.0;
  con.kappa = Poly::constant(1.0);
  con.kappa_n = Poly::constant(1.0);
  con.kind = PieceKind::Conical;
  spec.pieces = {flat, cyl, con};
  spec.s_lo = -0.25;
  spec.s_hi = 0.25;
  return spec;
}

inline std::shared_ptr<const DevelopableChart> build(const ChartSpec& spec) {
  return std::make_shared<const DevelopableChart>(build_chart(spec));
}

}  // namespace charts
