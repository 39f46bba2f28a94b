#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

namespace iacforge::util {

// Reads a JSON-Lines file; blank lines are skipped. Throws std::runtime_error
// on IO failure or malformed JSON (with the 1-based line number).
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

// Writes records as one compact JSON object per line, replacing the file.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

// Appends a single record; creates the file (and parent dirs) if needed.
void append_jsonl(const std::filesystem::path& path, const nlohmann::json& record);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace iacforge::util
