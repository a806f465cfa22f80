#pragma once

#include "mqne/block_graph.hpp"
#include "mqne/datasets.hpp"
#include "mqne/evolution.hpp"
#include "mqne/trainer.hpp"

#include <string>
#include <vector>

namespace mqne {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

/// 16-hex-digit FNV-1a content hash.
std::string fnv_hex(std::string_view bytes);
std::string fnv_file_hex(const std::string &path);

// --- gate-block library -----------------------------------------------------
// Line-oriented text: a header `k=7 mode=full include_empty=1 count=896`
// followed by one encoding vector per line, CRx section and rotation section
// separated by a semicolon: `1,2,5,4,0,0; 0,0,3,0,0,6,0`.

std::string library_to_text(const BlockLibrary &lib);
BlockLibrary library_from_text(const std::string &text);
void write_library(const std::string &file, const BlockLibrary &lib);
BlockLibrary read_library(const std::string &file);

// --- graph -------------------------------------------------------------------
// Header `nodes=<active> edges=<count>` then one adjacency list per active
// node: `<node>: <succ> <succ> ...` with successors ascending.

std::string graph_to_text(const BlockGraph &graph);
void write_graph(const std::string &file, const BlockGraph &graph);

// --- paths -------------------------------------------------------------------

Path parse_path(const std::string &text); // "4257 -> 6687 -> ..."
void write_path(const std::string &file, const Path &path);
Path read_path(const std::string &file);

// --- trained models ----------------------------------------------------------
// Versioned text: header, the source path, and one angle per line.

void write_model(const std::string &file, const TrainedModel &model);
struct ModelFile {
    int k = 0;
    Path path;
    AngleVector theta;
};
ModelFile read_model(const std::string &file);

// --- per-epoch history / per-generation logs ---------------------------------

std::string history_to_csv(const TrainedModel &model);
void write_history_csv(const std::string &file, const TrainedModel &model);

std::string generations_to_csv(const std::vector<GenerationLog> &logs);
void write_generations_csv(const std::string &file,
                           const std::vector<GenerationLog> &logs);

// --- dataset cache -----------------------------------------------------------
// Binary container (little-endian): magic "MQDS", u32 version, u32
// data_qubits, u32 feature length, u64 sample count, then per sample
// u8 label class, u8 partition, f64 metadata, f64 features. The provenance
// JSON goes to a `<file>.json` sidecar.

void write_dataset_cache(const std::string &file, const Dataset &dataset);
Dataset read_dataset_cache(const std::string &file);

} // namespace mqne
