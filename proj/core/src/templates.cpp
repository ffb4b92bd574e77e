#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>

#include "ambigate/errors.hpp"
#include "ambigate/evaluators.hpp"

namespace ambigate {

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos;
         pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

bool contains_icase(const std::string& haystack, const std::string& lowered_needle) {
    std::string lowered = haystack;
    for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lowered.find(lowered_needle) != std::string::npos;
}

}  // namespace

void PromptTemplate::validate() const {
    const std::string name = to_string(evaluator_id);
    if (count_occurrences(system_text, "{{instruction}}") != 1) {
        throw ParseError("template '" + name +
                             "' must contain the {{instruction}} placeholder exactly once",
                         0);
    }
    if (trim_copy(output_schema_hint).empty() || !contains_icase(output_schema_hint, "score")) {
        throw ParseError("template '" + name + "' must demand a final score line", 0);
    }
    for (const auto& [example_instruction, analysis] : few_shot_examples) {
        if (trim_copy(example_instruction).empty() || trim_copy(analysis).empty()) {
            throw ParseError("template '" + name + "' contains an incomplete example", 0);
        }
    }
}

PromptTemplate PromptTemplate::parse(EvaluatorId id, const std::string& file_text) {
    PromptTemplate tpl;
    tpl.evaluator_id = id;

    enum class Section { None, System, Example, Output };
    Section section = Section::None;
    std::string system_acc;
    std::string output_acc;
    std::string example_instruction;
    std::string example_analysis;
    bool in_analysis = false;

    auto flush_example = [&](std::size_t line_no) {
        if (section != Section::Example) return;
        if (trim_copy(example_instruction).empty()) {
            throw ParseError("[example] section lacks an instruction line", line_no);
        }
        tpl.few_shot_examples.emplace_back(trim_copy(example_instruction),
                                           trim_copy(example_analysis));
        example_instruction.clear();
        example_analysis.clear();
        in_analysis = false;
    };

    std::istringstream in(file_text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = trim_copy(line);
        if (trimmed == "[system]" || trimmed == "[example]" || trimmed == "[output]") {
            flush_example(line_no);
            section = trimmed == "[system]"    ? Section::System
                      : trimmed == "[example]" ? Section::Example
                                               : Section::Output;
            continue;
        }
        switch (section) {
            case Section::None:
                if (!trimmed.empty()) {
                    throw ParseError("text before the first section header", line_no);
                }
                break;
            case Section::System:
                system_acc += line;
                system_acc += '\n';
                break;
            case Section::Output:
                output_acc += line;
                output_acc += '\n';
                break;
            case Section::Example:
                if (trimmed.rfind("instruction:", 0) == 0) {
                    example_instruction = trimmed.substr(std::string("instruction:").size());
                    in_analysis = false;
                } else if (trimmed.rfind("analysis:", 0) == 0) {
                    example_analysis = trimmed.substr(std::string("analysis:").size());
                    in_analysis = true;
                } else if (in_analysis) {
                    example_analysis += '\n';
                    example_analysis += line;
                } else if (!trimmed.empty()) {
                    throw ParseError("unexpected text in [example] before instruction:", line_no);
                }
                break;
        }
    }
    flush_example(line_no);

    tpl.system_text = trim_copy(system_acc);
    tpl.output_schema_hint = trim_copy(output_acc);
    if (tpl.system_text.empty()) {
        throw ParseError("template lacks a [system] section", 0);
    }
    if (tpl.output_schema_hint.empty()) {
        throw ParseError("template lacks an [output] section", 0);
    }
    tpl.validate();
    return tpl;
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& dir) {
    TemplateRegistry registry;
    for (EvaluatorId id : all_evaluators()) {
        const std::filesystem::path path = dir / (to_string(id) + ".txt");
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw UnknownTemplate("template file not found: " + path.string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            registry.put(PromptTemplate::parse(id, buf.str()));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what(), e.line);
        }
    }
    return registry;
}

void TemplateRegistry::put(PromptTemplate tpl) {
    tpl.validate();
    const auto idx = static_cast<std::size_t>(tpl.evaluator_id);
    templates_[idx] = std::move(tpl);
}

const PromptTemplate& TemplateRegistry::get(EvaluatorId id) const {
    const auto idx = static_cast<std::size_t>(id);
    if (idx >= templates_.size() || !templates_[idx].has_value()) {
        throw UnknownTemplate("no template registered for evaluator '" + to_string(id) + "'");
    }
    return *templates_[idx];
}

std::string render_prompt(const PromptTemplate& tpl, const Instruction& instruction) {
    instruction.validate();
    tpl.validate();

    std::string body = tpl.system_text;
    replace_all(body, "{{instruction}}", instruction.text);
    replace_all(body, "{{context}}",
                instruction.context ? *instruction.context : "(no additional context provided)");

    std::string prompt = body;
    for (const auto& [example_instruction, analysis] : tpl.few_shot_examples) {
        prompt += "\n\nExample instruction: " + example_instruction;
        prompt += "\nExpected analysis: " + analysis;
    }
    prompt += "\n\n" + tpl.output_schema_hint;
    return prompt;
}

}  // namespace ambigate
