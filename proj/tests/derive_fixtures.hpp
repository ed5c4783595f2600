#pragma once

// Reference values for tests/fixtures/derived.json, computed from the oracles alone
// (dense matrices, brute-force paths, Schur complements, eigensolvers).

#include <json.hpp>

nlohmann::json derive_fixtures();

/// Largest absolute difference between two JSON documents of the same shape; infinity
/// when keys, sizes or non-numeric values differ.
double json_distance(const nlohmann::json& a, const nlohmann::json& b);
