#include "generator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace testsupport {

namespace {

struct TypeInfo {
  const char* type;
  const char* key_attr;
  const char* key_value;
};

const std::vector<TypeInfo>& type_table() {
  static const std::vector<TypeInfo> table{
      {"aws_s3_bucket", "bucket", "gen-bucket"},
      {"aws_instance", "ami", "ami-12345"},
      {"aws_security_group", "name", "gen-sg"},
      {"aws_db_instance", "engine", "postgres"},
      {"docker_container", "image", "nginx:latest"},
      {"docker_image", "name", "nginx"},
      {"random_pet", "prefix", "gen"},
      {"null_resource", "triggers_note", "noop"},
      {"tls_private_key", "algorithm", "RSA"},
  };
  return table;
}

int pick(std::mt19937_64& rng, int lo, int hi) {
  // Portable in-house modulo draw; distribution bias is irrelevant here.
  return lo + static_cast<int>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

bool chance(std::mt19937_64& rng, int percent) { return pick(rng, 1, 100) <= percent; }

std::string provider_of(const std::string& type) {
  auto p = type.find('_');
  return p == std::string::npos ? type : type.substr(0, p);
}

struct ResourceDraft {
  std::string type;
  std::string name;
  std::vector<std::string> attr_lines;
  std::vector<std::string> depends;
};

}  // namespace

Defect random_defect(std::mt19937_64& rng) {
  switch (pick(rng, 0, 5)) {
    case 0: return Defect::UnresolvedRef;
    case 1: return Defect::DuplicateAddress;
    case 2: return Defect::MissingDefault;
    case 3: return Defect::Cycle;
    case 4: return Defect::UnknownProvider;
    default: return Defect::LabelCount;
  }
}

std::string random_config(std::mt19937_64& rng, const GenOptions& options) {
  const auto& types = type_table();
  int count = pick(rng, 1, std::max(1, options.max_resources));

  std::vector<ResourceDraft> resources;
  std::map<std::string, std::string> variables;  // name -> default literal
  int var_counter = 0;

  for (int i = 0; i < count; ++i) {
    ResourceDraft r;
    const auto& info = types[static_cast<size_t>(pick(rng, 0, static_cast<int>(types.size()) - 1))];
    r.type = info.type;
    r.name = "r" + std::to_string(i);
    r.attr_lines.push_back(std::string(info.key_attr) + " = \"" + info.key_value + "-" +
                           std::to_string(i) + "\"");

    if (chance(rng, 50)) {
      r.attr_lines.push_back("count_hint = " + std::to_string(pick(rng, 1, 9)));
    }
    if (chance(rng, 30)) {
      r.attr_lines.push_back(std::string("enabled = ") + (chance(rng, 50) ? "true" : "false"));
    }
    if (chance(rng, 30)) {
      r.attr_lines.push_back("labels_list = [\"a\", \"b\", \"c\"]");
    }
    if (chance(rng, 25)) {
      r.attr_lines.push_back("tags = { team = \"infra\", tier = " + std::to_string(pick(rng, 1, 3)) +
                             " }");
    }
    if (chance(rng, 20)) {
      std::string var = "v" + std::to_string(var_counter++);
      variables[var] = "\"value-" + var + "\"";
      r.attr_lines.push_back("from_var = var." + var);
    }
    if (chance(rng, 15)) {
      std::string var = "v" + std::to_string(var_counter++);
      variables[var] = "\"part-" + var + "\"";
      r.attr_lines.push_back("described = \"prefix-${var." + var + "}-suffix\"");
    }
    if (chance(rng, 15)) {
      r.attr_lines.push_back("rendered = jsonencode({ key = \"v\" })");
    }
    if (chance(rng, 10)) {
      r.attr_lines.push_back("doc = <<EOT\nline one\n  line two\nEOT");
    }
    if (i > 0 && chance(rng, 40)) {
      const auto& target = resources[static_cast<size_t>(pick(rng, 0, i - 1))];
      if (chance(rng, 50)) {
        r.attr_lines.push_back("upstream_ref = " + target.type + "." + target.name + ".id");
      } else {
        r.depends.push_back(target.type + "." + target.name);
      }
    }
    resources.push_back(std::move(r));
  }

  // Defect injection.
  if (options.defect == Defect::UnresolvedRef) {
    resources[static_cast<size_t>(pick(rng, 0, count - 1))].attr_lines.push_back(
        "broken_ref = aws_subnet.missing.id");
  }
  if (options.defect == Defect::MissingDefault) {
    resources[static_cast<size_t>(pick(rng, 0, count - 1))].attr_lines.push_back(
        "needs_input = var.undefaulted");
  }
  if (options.defect == Defect::Cycle) {
    if (count >= 2) {
      resources[0].depends.push_back(resources[count - 1].type + "." + resources[count - 1].name);
      resources[static_cast<size_t>(count - 1)].depends.push_back(resources[0].type + "." +
                                                                  resources[0].name);
    } else {
      resources[0].depends.push_back(resources[0].type + "." + resources[0].name);
    }
  }

  std::set<std::string> providers;
  for (const auto& r : resources) providers.insert(provider_of(r.type));

  std::vector<std::string> blocks;

  for (const auto& p : providers) {
    std::ostringstream b;
    b << "provider \"" << p << "\" {";
    if (p == "aws") {
      b << "\n  region = \"us-east-" << pick(rng, 1, 2) << "\"\n}";
    } else {
      b << "}";
    }
    blocks.push_back(b.str());
  }

  for (const auto& [name, def] : variables) {
    std::ostringstream b;
    b << "variable \"" << name << "\" {\n  default = " << def << "\n}";
    blocks.push_back(b.str());
  }
  if (options.defect == Defect::MissingDefault) {
    blocks.push_back("variable \"undefaulted\" {\n  type_note = \"string\"\n}");
  }

  auto render_resource = [&](const ResourceDraft& r, const std::string& name) {
    std::ostringstream b;
    b << "resource \"" << r.type << "\" \"" << name << "\" {";
    auto lines = r.attr_lines;
    if (options.noise) {
      std::shuffle(lines.begin(), lines.end(), rng);
    }
    for (const auto& line : lines) b << "\n  " << line;
    if (!r.depends.empty()) {
      b << "\n  depends_on = [";
      for (size_t i = 0; i < r.depends.size(); ++i) {
        if (i) b << ", ";
        b << r.depends[i];
      }
      b << "]";
    }
    if (options.noise && chance(rng, 30)) b << "\n  # generated";
    b << "\n}";
    return b.str();
  };

  for (const auto& r : resources) blocks.push_back(render_resource(r, r.name));

  if (options.defect == Defect::DuplicateAddress) {
    const auto& r = resources[static_cast<size_t>(pick(rng, 0, count - 1))];
    blocks.push_back(render_resource(r, r.name));
  }
  if (options.defect == Defect::UnknownProvider) {
    blocks.push_back("resource \"zzqcloud_widget\" \"w\" {\n  size = 1\n}");
  }
  if (options.defect == Defect::LabelCount) {
    blocks.push_back("resource \"half_addressed\" {\n  size = 1\n}");
  }

  if (options.noise) {
    std::shuffle(blocks.begin(), blocks.end(), rng);
  }

  std::ostringstream out;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (options.noise && chance(rng, 40)) {
      out << "# note " << pick(rng, 1, 99) << "\n";
    }
    out << blocks[i] << "\n";
    if (i + 1 < blocks.size()) out << "\n";
    if (options.noise && chance(rng, 20)) out << "\n";
  }
  if (options.noise && chance(rng, 30)) out << "/* trailing\n   remark */\n";
  return out.str();
}

}  // namespace testsupport
