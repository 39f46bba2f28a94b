#include "iacforge/repair/templates.hpp"

namespace iacforge::repair {

namespace {

bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

const char* kRepairFv2 = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

You will be given:
(a) A Terraform configuration written in HCL, intended for Terraform v1.12.0. This code currently fails the terraform plan command.
(b) The error message output from running terraform plan.

Your task is to:
(a) Clearly explain the cause of the error in your own words.
(b) Describe how you will fix the issue.
(c) Provide a fully corrected version of the Terraform configuration (in HCL) that ensures terraform plan completes successfully.

Requirements:
(i) If the error indicates "timed out", it is possibly because Terraform waits for interactive input to fill a variable with no default value.
    Ensure that you add reasonable default values for all input variables for non-interactive execution.
(ii) You are permitted to modify any aspect of the Terraform code, including adding or removing entire blocks, arguments, or resources. Apply changes as rigorously as necessary to ensure that terraform plan completes successfully.
(iii) You must ensure compatibility with Terraform version 1.12.0.
(iv) You may remove problematic elements such as assume_role blocks or profile = "admin-1" if they can cause permission errors.
(v) Terraform will rely on default credentials (e.g., EC2 instance metadata or environment variables), so explicit credential configuration should be removed if problematic.
(vi) You are only allowed to change the Terraform code. Do not assume access to other configuration files or systems.

Here are three examples of correct Terraform HCL codes:

### Example-1
```hcl
{TF_example1}
```

### Example-2
```hcl
{TF_example2}
```

### Example-3
```hcl
{TF_example3}
```

Here is the incorrect configuration (in Terraform HCL):
<incorrect_terraform_config>
```hcl
{config}
```
</incorrect_terraform_config>

Here is the error message obtained by running terraform plan command or a timeout notice if the command does not complete within 30 seconds:
<error_message>
{error_message_TFplan}
</error_message>

Return the correct Terraform configuration within the following tags. Do not return empty code.
<corrected_terraform_config>
(Your entire Terraform configuration goes here)
</corrected_terraform_config>)tmpl";

const char* kRepairFv1 = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

You will be given:
(a) A Terraform configuration written in HCL, intended for Terraform v1.12.0. This code currently fails the terraform validate command.
(b) The error message output from running terraform validate.

Your task is to:
(a) Clearly explain the cause of the error in your own words.
(b) Describe how you will fix the issue.
(c) Provide a fully corrected version of the Terraform configuration (in HCL) that ensures terraform validate completes successfully.

Requirements:
(i) Ensure that you add reasonable default values for all input variables for non-interactive execution.
(ii) You are permitted to modify any aspect of the Terraform code, including adding or removing entire blocks, arguments, or resources. Apply changes as rigorously as necessary to ensure that terraform validate completes successfully.
(iii) You must ensure compatibility with Terraform version 1.12.0.
(iv) You are only allowed to change the Terraform code. Do not assume access to other configuration files or systems.

Here are three examples of correct Terraform HCL codes:

### Example-1
```hcl
{TF_example1}
```

### Example-2
```hcl
{TF_example2}
```

### Example-3
```hcl
{TF_example3}
```

Here is the incorrect configuration (in Terraform HCL):
<incorrect_terraform_config>
```hcl
{config}
```
</incorrect_terraform_config>

Here is the error message obtained by running terraform validate command:
<error_message>
{error_message_TFvalidate}
</error_message>

Return the correct Terraform configuration within the following tags. Do not return empty code.
<corrected_terraform_config>
(Your entire Terraform configuration goes here)
</corrected_terraform_config>)tmpl";

const char* kRepairFv3 = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform and policy-as-code.

You will be given:
(a) A Terraform configuration written in HCL that passes terraform plan.
(b) A natural-language prompt describing the infrastructure intent.
(c) A policy, expressed as a JSON rule set, that currently fails evaluation against the configuration's resource graph.
(d) The error message output from the policy evaluation.

Your task is to:
(a) Clearly explain why the policy fails against this configuration.
(b) Describe how you will fix the policy.
(c) Provide a fully corrected policy that passes evaluation while still capturing the prompt's intent.

Requirements:
(i) Keep every rule checkable against the configuration's resource graph.
(ii) Cover the configuration elements mentioned in the prompt; do not reduce the policy to a trivial rule set.
(iii) You are only allowed to change the policy. Do not change the Terraform configuration.

Here is the Terraform configuration (in HCL):
<terraform_config>
```hcl
{config}
```
</terraform_config>

Here is the prompt describing the intent:
<user_prompt>
{prompt}
</user_prompt>

Here is the current policy:
<incorrect_policy>
{policy}
</incorrect_policy>

Here is the error message obtained by evaluating the policy:
<error_message>
{error_message_policy}
</error_message>

Return the corrected policy within the following tags. Do not return an empty policy.
<corrected_policy>
(Your entire policy goes here)
</corrected_policy>)tmpl";

const char* kGenFewshot = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

Your task is to:
Given an user prompt, generate a **single**, **fully self-contained**, and **valid** Terraform configuration written in HCL. Your configuration must:
- Satisfy the intent of the user prompt.
- Be compatible with **Terraform v1.12.0**.
- Pass both `terraform validate` and `terraform plan`.
- Include a valid `provider` block.
- Contain no undeclared variables or references.
- Avoid the use of `assume_role`, custom `profile` values, or external dependencies.
- Use only the following providers: `aws`, `random`, `null`, `local`, `template`, `tls`, `time`, `external`, `http`, `archive`, `docker`, `terraform`.

Here are a few examples:

### Example-1
Prompt: {prompt_example1}
Configuration:
```hcl
{TF_gen_example1}
```

### Example-2
Prompt: {prompt_example2}
Configuration:
```hcl
{TF_gen_example2}
```

### Example-3
Prompt: {prompt_example3}
Configuration:
```hcl
{TF_gen_example3}
```

Here is the **actual** user prompt:
<user_prompt>
{request}
</user_prompt>

Now respond to the actual user prompt by returning **one single** Terraform configuration. Do not repeat or revise the configuration. Importantly, enclose the final configuration inside the following tags:

<final_terraform_config>
(Provide your entire Terraform configuration within these tags)
</final_terraform_config>)tmpl";

const char* kMutnFewshot = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

Your task is to:
Given an existing Terraform configuration and an user prompt requesting changes, generate a **single**, **modified** Terraform configuration written in HCL that is **fully self-contained** and **valid**. Your configuration must:
- Be a modified version of the existing Terraform configuration.
- Satisfy the intent of the changes requested in the user prompt.
- Be compatible with **Terraform v1.12.0**.
- Pass both `terraform validate` and `terraform plan`.
- Include a valid `provider` block.
- Contain no undeclared variables or references.
- Avoid the use of `assume_role`, custom `profile` values, or external dependencies.
- Use only the following providers: `aws`, `random`, `null`, `local`, `template`, `tls`, `time`, `external`, `http`, `archive`, `docker`, `terraform`.

Here are a few examples:

### Example-1
Initial Configuration:
```hcl
{TF_init_example1}
```
Prompt: {prompt_example1}
Mutated Configuration:
```hcl
{TF_mutn_example1}
```

### Example-2
Initial Configuration:
```hcl
{TF_init_example2}
```
Prompt: {prompt_example2}
Mutated Configuration:
```hcl
{TF_mutn_example2}
```

### Example-3
Initial Configuration:
```hcl
{TF_init_example3}
```
Prompt: {prompt_example3}
Mutated Configuration:
```hcl
{TF_mutn_example3}
```

Here is the **initial Terraform configuration**:
<initial_terraform_config>
```hcl
{TF_init}
```
</initial_terraform_config>

Here is the **user prompt** requesting changes:
<user_prompt>
{prompt}
</user_prompt>

Now respond by returning **a single**, **modified** Terraform configuration. Importantly, enclose the final configuration inside the following tags:

<mutated_terraform_config>
(Provide your entire modified Terraform configuration within these tags)
</mutated_terraform_config>)tmpl";

const char* kPromptGen = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

You will be given a Terraform configuration written in HCL.

Your task is to:
Write a natural-language prompt from which this configuration could be faithfully reconstructed.

Requirements:
(i) Begin the prompt with a directive verb (e.g., Generate, Set up, Deploy).
(ii) Use a concise, goal-oriented tone that emphasizes what to provision rather than how.
(iii) {level_instruction}
(iv) If a previous prompt and reviewer feedback appear below, revise the prompt to address the feedback; otherwise write a fresh prompt.

Here is the Terraform configuration (in HCL):
<terraform_config>
```hcl
{config}
```
</terraform_config>

Here is the previous prompt, if any:
<previous_prompt>
{current_prompt}
</previous_prompt>

Here is the reviewer feedback, if any:
<feedback>
{feedback}
</feedback>

Return the prompt within the following tags. Do not return an empty prompt.
<generated_prompt>
(Your prompt goes here)
</generated_prompt>)tmpl";

const char* kPolicyGen = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform and policy-as-code.

You will be given:
(a) A Terraform configuration written in HCL that passes terraform plan.
(b) A natural-language prompt describing the infrastructure intent.

Your task is to:
Generate a policy, expressed as a JSON object, that captures the prompt's intent as machine-verifiable rules over the configuration's resource graph.

Requirements:
(i) The policy must be a JSON object with a "rules" array; every rule carries a unique "name", a "predicate", and a "params" object.
(ii) Allowed predicates and their params: resource_exists (type), resource_count_at_least (type, count), attribute_equals (address, path, value), attribute_matches (address, path, pattern), dependency_exists (from, to), provider_declared (name).
(iii) Cover all configuration elements mentioned in the prompt; do not generate a trivial single-rule policy for a multi-resource intent.
(iv) Every rule must pass against the given configuration.

Here is the Terraform configuration (in HCL):
<terraform_config>
```hcl
{config}
```
</terraform_config>

Here is the prompt describing the intent:
<user_prompt>
{prompt}
</user_prompt>

Return the policy within the following tags. Do not return an empty policy.
<generated_policy>
(Your entire policy JSON goes here)
</generated_policy>)tmpl";

const char* kCloneGen = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

You will be given:
(a) A natural-language user prompt.
(b) An existing Terraform configuration that satisfies the prompt.

Your task is to:
Generate a **different** valid Terraform configuration that satisfies the same prompt. The new configuration must:
- Be genuinely distinct from the existing configuration, not a comment or formatting variant.
- Be compatible with **Terraform v1.12.0**.
- Pass both `terraform validate` and `terraform plan`.
- Satisfy the same infrastructure intent, so that the same policy rules hold.
- Use only the following providers: `aws`, `random`, `null`, `local`, `template`, `tls`, `time`, `external`, `http`, `archive`, `docker`, `terraform`.

Here is the user prompt:
<user_prompt>
{prompt}
</user_prompt>

Here is the existing configuration (in Terraform HCL):
<existing_terraform_config>
```hcl
{config}
```
</existing_terraform_config>

Here is feedback on previous attempts, if any:
<feedback>
{feedback}
</feedback>

Return the new configuration within the following tags. Do not return empty code.
<cloned_terraform_config>
(Your entire Terraform configuration goes here)
</cloned_terraform_config>)tmpl";

const char* kMutationGen = R"tmpl(You are an expert Infrastructure-as-Code (IaC) developer with deep expertise in Terraform.

You will be given an existing Terraform configuration written in HCL that passes terraform plan.

Your task is to:
(a) Invent a realistic change request for this infrastructure (for example adding a resource, tightening a setting, or renaming and rewiring a dependency), phrased as a concise user prompt that begins with a directive verb.
(b) Apply the change and produce the mutated configuration.
(c) Produce an updated policy, expressed as a JSON object with a "rules" array, that the mutated configuration passes and that reflects the change.

Requirements:
(i) The mutated configuration must be compatible with **Terraform v1.12.0** and pass both `terraform validate` and `terraform plan`.
(ii) The updated policy must differ from a policy describing the initial configuration; it must mention the changed or added elements.
(iii) Allowed predicates and their params: resource_exists (type), resource_count_at_least (type, count), attribute_equals (address, path, value), attribute_matches (address, path, pattern), dependency_exists (from, to), provider_declared (name).
(iv) Use only the following providers: `aws`, `random`, `null`, `local`, `template`, `tls`, `time`, `external`, `http`, `archive`, `docker`, `terraform`.

Here is the initial configuration (in Terraform HCL):
<initial_terraform_config>
```hcl
{config}
```
</initial_terraform_config>

Here is feedback on previous attempts, if any:
<feedback>
{feedback}
</feedback>

Return all three parts, each within its own tags:
<mutation_prompt>
(The change request goes here)
</mutation_prompt>
<mutated_terraform_config>
(Your entire mutated Terraform configuration goes here)
</mutated_terraform_config>
<mutated_policy>
(The updated policy JSON goes here)
</mutated_policy>)tmpl";

const char* kJudgeAlign = R"tmpl(You are an expert cloud infrastructure reviewer.

You will be given a natural-language prompt and a Terraform configuration written in HCL.

Your task is to:
Judge whether the prompt faithfully describes the configuration, so that the configuration could be reconstructed from the prompt alone.

Requirements:
(i) Answer with a single line containing either VERDICT: YES or VERDICT: NO.
(ii) If the verdict is NO, follow that line with concise feedback listing what the prompt misses or misstates.

Here is the prompt:
<user_prompt>
{prompt}
</user_prompt>

Here is the Terraform configuration (in HCL):
<terraform_config>
```hcl
{config}
```
</terraform_config>)tmpl";

struct TemplateEntry {
  const char* id;
  const char* body;
};

const TemplateEntry kTemplates[] = {
    {"repair-fv1", kRepairFv1},   {"repair-fv2", kRepairFv2},
    {"repair-fv3", kRepairFv3},   {"gen-fewshot", kGenFewshot},
    {"mutn-fewshot", kMutnFewshot}, {"prompt-gen", kPromptGen},
    {"policy-gen", kPolicyGen},   {"clone-gen", kCloneGen},
    {"mutation-gen", kMutationGen}, {"judge-align", kJudgeAlign},
};

}  // namespace

std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tmpl.body.size());
  const std::string& body = tmpl.body;

  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') {
      out.push_back(body[i]);
      continue;
    }
    std::size_t j = i + 1;
    while (j < body.size() && ident_char(body[j])) ++j;
    if (j == i + 1 || j >= body.size() || body[j] != '}') {
      out.push_back('{');  // not a slot marker, keep literally
      continue;
    }
    std::string name = body.substr(i + 1, j - i - 1);
    auto it = slots.find(name);
    if (it == slots.end()) throw MissingSlot(name);
    out += it->second;
    i = j;
  }
  return out;
}

PromptTemplate builtin_template(std::string_view id) {
  for (const auto& entry : kTemplates) {
    if (id == entry.id) return PromptTemplate{std::string(id), entry.body};
  }
  throw UnknownTemplate(std::string(id));
}

const std::vector<std::string>& builtin_template_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& entry : kTemplates) v.emplace_back(entry.id);
    return v;
  }();
  return ids;
}

std::string_view to_string(PromptLevel level) {
  switch (level) {
    case PromptLevel::High: return "high";
    case PromptLevel::Mid: return "mid";
    case PromptLevel::Low: return "low";
  }
  return "mid";
}

PromptLevel prompt_level_from_string(std::string_view s) {
  if (s == "high") return PromptLevel::High;
  if (s == "mid") return PromptLevel::Mid;
  if (s == "low") return PromptLevel::Low;
  throw std::invalid_argument("unknown prompt level '" + std::string(s) + "'");
}

std::string level_instruction(PromptLevel level) {
  switch (level) {
    case PromptLevel::High:
      return "Give a broad overview of the infrastructure goal; avoid attribute-level detail.";
    case PromptLevel::Mid:
      return "Provide moderate detail: name the resources and the settings that matter, without "
             "exhaustively listing attributes.";
    case PromptLevel::Low:
      return "Stay closely aligned with the configuration, mentioning every resource and its "
             "important attribute values.";
  }
  return "";
}

const std::vector<std::string>& builtin_default_examples() {
  static const std::vector<std::string> examples = {
      R"(provider "aws" {
  region = "us-east-1"
}

resource "aws_s3_bucket" "logs" {
  bucket = "example-log-archive"
}
)",
      R"(provider "aws" {
  region = "us-west-2"
}

variable "instance_name" {
  default = "web-1"
}

resource "aws_instance" "web" {
  ami           = "ami-0c55b159cbfafe1f0"
  instance_type = "t3.micro"

  tags = {
    Name = var.instance_name
  }
}
)",
      R"(provider "random" {}

resource "random_pet" "suffix" {
  length = 2
}

resource "null_resource" "marker" {
  note = random_pet.suffix.id
}
)",
  };
  return examples;
}

}  // namespace iacforge::repair
