#include "repo_fixture.hpp"

#include <fstream>

namespace testsupport {

namespace {

std::string clean_module(int i) {
  auto n = std::to_string(i);
  std::string text = "provider \"aws\" {\n  region = \"us-east-1\"\n}\n\n";
  text += "variable \"bucket_name_" + n + "\" {\n  default = \"store-" + n + "\"\n}\n\n";
  text += "resource \"aws_s3_bucket\" \"primary\" {\n  bucket = var.bucket_name_" + n + "\n";
  if (i % 2 == 0) {
    text += "\n  versioning {\n    enabled = true\n  }\n";
  }
  text += "}\n\n";
  text += "resource \"aws_s3_bucket\" \"audit\" {\n  bucket = \"audit-" + n +
          "\"\n  depends_on = [aws_s3_bucket.primary]\n}\n";
  if (i % 3 == 0) {
    text += "\noutput \"primary_bucket_" + n + "\" {\n  value = aws_s3_bucket.primary.bucket\n}\n";
  }
  return text;
}

std::string second_module(int i) {
  auto n = std::to_string(i);
  return "provider \"random\" {\n}\n\n"
         "resource \"random_pet\" \"suffix\" {\n  length = " +
         std::to_string(2 + i % 3) +
         "\n}\n\n"
         "resource \"null_resource\" \"tracker_" +
         n + "\" {\n  triggers = {\n    pet = random_pet.suffix.id\n  }\n}\n\n"
         "provider \"null\" {\n}\n";
}

std::string parse_broken_module() {
  return clean_module(900) + "!!!BROKEN!!! not hcl at all\n";
}

std::string unresolved_module() {
  return "provider \"aws\" {\n  region = \"eu-west-1\"\n}\n\n"
         "resource \"aws_s3_bucket\" \"archive\" {\n  bucket = var.archive_name\n}\n";
}

std::string missing_default_module() {
  return "provider \"aws\" {\n  region = \"eu-central-1\"\n}\n\n"
         "variable \"zone_count\" {\n}\n\n"
         "resource \"aws_s3_bucket\" \"zones\" {\n  bucket = \"zones\"\n  tags = {\n"
         "    zones = var.zone_count\n  }\n}\n";
}

std::string cycle_module() {
  return "provider \"aws\" {\n  region = \"us-west-1\"\n}\n\n"
         "resource \"aws_s3_bucket\" \"first\" {\n  bucket = \"first\"\n"
         "  depends_on = [aws_s3_bucket.second]\n}\n\n"
         "resource \"aws_s3_bucket\" \"second\" {\n  bucket = \"second\"\n"
         "  depends_on = [aws_s3_bucket.first]\n}\n";
}

std::string dup_address_module() {
  return "provider \"aws\" {\n  region = \"sa-east-1\"\n}\n\n"
         "resource \"aws_s3_bucket\" \"same\" {\n  bucket = \"one\"\n}\n\n"
         "resource \"aws_s3_bucket\" \"same\" {\n  bucket = \"two\"\n}\n";
}

std::string filtered_module(int i) {
  return "provider \"gcp\" {\n  project = \"demo-" + std::to_string(i) +
         "\"\n}\n\n"
         "resource \"gcp_storage_bucket\" \"b\" {\n  name = \"demo-" +
         std::to_string(i) + "\"\n}\n";
}

}  // namespace

std::vector<iacforge::curate::ModuleEntry> fixture_corpus(const CorpusSpec& spec) {
  std::vector<iacforge::curate::ModuleEntry> entries;
  for (int i = 0; i < spec.clean; ++i) {
    entries.push_back({"repo-clean-" + std::to_string(i), ".", clean_module(i)});
  }
  for (int i = 0; i < spec.two_module; ++i) {
    auto repo = "repo-pair-" + std::to_string(i);
    entries.push_back({repo, "storage", clean_module(1000 + i)});
    entries.push_back({repo, "naming", second_module(i)});
  }
  if (spec.with_defects) {
    entries.push_back({"repo-broken-parse", ".", parse_broken_module()});
    entries.push_back({"repo-broken-ref", ".", unresolved_module()});
    entries.push_back({"repo-broken-default", ".", missing_default_module()});
    entries.push_back({"repo-broken-cycle", ".", cycle_module()});
    entries.push_back({"repo-broken-dup", ".", dup_address_module()});
  }
  for (int i = 0; i < spec.filtered; ++i) {
    entries.push_back({"repo-filtered-" + std::to_string(i), ".", filtered_module(i)});
  }
  for (int i = 0; i < spec.duplicates; ++i) {
    entries.push_back({"repo-duplicate-" + std::to_string(i), ".", clean_module(i)});
  }
  return entries;
}

void write_corpus_tree(const std::filesystem::path& root,
                       const std::vector<iacforge::curate::ModuleEntry>& entries) {
  for (const auto& entry : entries) {
    auto dir = root / entry.repo_id;
    if (entry.module_path != ".") dir /= entry.module_path;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "main.tf", std::ios::binary);
    out << entry.text;
  }
}

}  // namespace testsupport
