#pragma once
// JSON round trips for the core algebra objects, plus the machine-readable
// solver / run reports.  Term order is the container order (lexicographic in
// (k, l, alpha, beta)), so dumps of equal objects are byte-identical and
// diffable.

#include <json.hpp>

#include "kam/solvers.hpp"

namespace kam {

using json = nlohmann::ordered_json;

json to_json(const TorusFourier& f);
TorusFourier fourier_from_json(const json& j);

json to_json(const HamiltonianPoly& P);
HamiltonianPoly poly_from_json(const json& j);

json to_json(const NormalForm& N);
NormalForm normal_form_from_json(const json& j);

// FNV-1a over the canonical dump; embedded in every report
std::string config_hash(const json& j);

// inputs hash, divisor minima, per-class residuals, norm certificates
json solver_report_json(const BlockSolveResult& sol, const json& inputs);

}  // namespace kam
