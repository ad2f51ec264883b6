#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crscore/errors.hpp"

namespace crscore {

struct Message {
  std::string role;
  std::string content;
};

enum class Problem { Assortment, Pricing, Newsvendor };
enum class Method { Sampling, PersonaSampling, BatchGeneration, Description };

inline const char* to_string(Problem p) {
  switch (p) {
    case Problem::Assortment: return "assortment";
    case Problem::Pricing: return "pricing";
    case Problem::Newsvendor: return "newsvendor";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Sampling: return "Sampling";
    case Method::PersonaSampling: return "PersonaSampling";
    case Method::BatchGeneration: return "BatchGeneration";
    case Method::Description: return "Description";
  }
  return "?";
}

/// Everything a prompt template may interpolate. Which fields are required
/// depends on problem and method.
struct PromptContext {
  std::vector<std::string> item_descriptions;   // assortment: the 10 sushi items
  std::vector<std::string> example_decisions;   // few-shot: 6 rendered decisions
  std::string persona;                          // PersonaSampling
  std::vector<std::string> reference_items;     // newsvendor: rendered blocks with KNOWN STATISTICS
  std::string target_item;                      // newsvendor: rendered feature block
  int batch_size = 0;                           // BatchGeneration override (0 = default)
};

namespace detail {

inline std::string numbered_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out += "- " + std::to_string(i) + ": " + items[i] + "\n";
  return out;
}

inline std::string few_shot_block(const std::vector<std::string>& examples) {
  if (examples.size() != 6) throw MissingContext("few-shot needs exactly 6 example decisions");
  std::string out =
      "To help with the estimation task, we provide some examples of a respondent's decision as guidance "
      "for the model.\n\nThe examples are listed below:\n\nExamples (totally 6 examples):\n";
  for (std::size_t i = 0; i < examples.size(); ++i)
    out += "- " + std::to_string(i) + ": A person made a decision of: " + examples[i] + "\n";
  out += "\n";
  return out;
}

inline std::string persona_block(const std::string& persona) {
  if (persona.empty()) throw MissingContext("persona sampling needs a persona description");
  return "To help with the estimation task, we provide a persona description of the one you should pretend "
         "to be.\n\nSo, pretend you are " +
         persona + ".\n\n";
}

inline std::string sushi_background(const std::vector<std::string>& items) {
  if (items.size() != 10) throw MissingContext("assortment prompts need 10 item descriptions");
  return "We study sushi preference patterns among Japanese consumers. The sushi items listed below are "
         "those considered.\n\nSushi items (Target items):\n" +
         numbered_list(items) + "\n";
}

inline std::string chocolate_background() {
  return "We study willingness-to-pay premiums for tablea chocolate products among consumers from Central "
         "Bicol State University of Agriculture in the Philippines. You will help us simulate "
         "willingness-to-pay decision. Here are three target items with their awards/origin:\n\n"
         "Chocolate products (providing awards):\n"
         "- Bohol: won Academy of Chocolate\n"
         "- Davao: won Great Taste\n"
         "- ImprovedBicol: no award\n\n"
         "Chocolate products (providing origin):\n"
         "- Bohol: Bohol island cacao\n"
         "- Davao: Davao region cacao\n"
         "- ImprovedBicol: Bicol region cacao\n\n";
}

inline std::string assortment_task(Method method, const PromptContext& ctx) {
  const int batch = ctx.batch_size > 0 ? ctx.batch_size : 30;
  switch (method) {
    case Method::Sampling:
    case Method::PersonaSampling:
      return "Based on the information provided, please simulate a Japanese respondent's sushi preference "
             "ranking.\n\n"
             "Task: Generate one ranking to represent a potential preference ordering over the 10 sushi "
             "items.\n\n"
             "INSTRUCTIONS:\n"
             "1. First, explain your reasoning. Consider the sushi item descriptions (and examples and "
             "persona if we provided).\n"
             "2. Second, provide the final ranking as exactly 10 unique integers from 0 to 9, ordered from "
             "most preferred to least preferred.\n\n"
             "Output Format: Reasoning: [...]\n"
             "Final Answer: [10 integers separated by spaces]\n";
    case Method::BatchGeneration:
      return "Based on the information provided, please generate a representative batch of sushi preference "
             "rankings.\n\n"
             "Task: Generate a batch of " +
             std::to_string(batch) +
             " independent preference rankings over the 10 sushi items.\n\n"
             "INSTRUCTIONS:\n"
             "1. First, explain your reasoning. Consider the sushi item descriptions (and examples if we "
             "provided).\n"
             "2. Second, please output exactly " +
             std::to_string(batch) +
             " rankings, each consisting of 10 unique integers from 0 to 9, ordered from most preferred to "
             "least preferred.\n\n"
             "Output Format: Reasoning: [...]\n"
             "Final Answer: [" +
             std::to_string(batch) + " lines of rankings, each line corresponding to one ranking.]\n";
    case Method::Description:
      return "Based on the information provided, please verbalize the utilities for the 10 sushi.\n\n"
             "Task: Provide utilities to 10 sushi, and utilities can be any real numbers (scale/shift "
             "invariant) and must be floats in [0, 5].\n\n"
             "INSTRUCTIONS:\n"
             "1. First, explain your reasoning. Consider the sushi item descriptions (and examples if we "
             "provided).\n"
             "2. Second, provide the utilities.\n\n"
             "Output Format: Reasoning: [...]\n"
             "Final Answer: [\"0\": <float>, \"1\": <float>, ..., \"9\": <float>]\n";
  }
  throw ConfigError("unknown method");
}

inline std::string pricing_task(Method method, const PromptContext& ctx) {
  const int batch = ctx.batch_size > 0 ? ctx.batch_size : 25;
  const std::string opening =
      "Based on the information provided, please finish the task below. Suppose you hold an endowment "
      "chocolate (regular Bicol) worth 44 PHP.\n\n";
  switch (method) {
    case Method::Sampling:
    case Method::PersonaSampling:
      return opening +
             "Task: For each target product, report the premium (additional PHP over 44) you'd be willing "
             "to pay to exchange for it.\n\n"
             "INSTRUCTIONS:\n"
             "1. First, explain your reasoning. Consider the chocolate item descriptions (and examples and "
             "persona if we provided).\n"
             "2. Second, provide the premium (additional PHP over 44) you'd be willing to pay to exchange "
             "for each target product, and each premium value must be between 0 and 100. Use non-negative "
             "numbers; if you would not exchange for that product, use 0.\n\n"
             "Output Format: Reasoning: [...]\n"
             "Final Answer: [{\"Bohol\": X, \"Davao\": Y, \"ImprovedBicol\": Z}]\n";
    case Method::BatchGeneration:
      return opening +
             "Task: For each target product, provide " +
             std::to_string(batch) +
             " independent premiums (additional PHP over 44) you'd be willing to pay to exchange for "
             "it.\n\n"
             "INSTRUCTIONS:\n"
             "1. First, explain your reasoning. Consider the chocolate item descriptions (and examples if "
             "we provided).\n"
             "2. Second, provide " +
             std::to_string(batch) +
             " premiums (additional PHP over 44) you'd be willing to pay to exchange for each target "
             "product, and each premium value must be between 0 and 100. Use non-negative numbers; if you "
             "would not exchange for that product, use 0.\n\n"
             "Output Format: Reasoning: [...]\n"
             "Final Answer: [{\"Bohol\": X_1, \"Davao\": Y_1, \"ImprovedBicol\": Z_1},...,{\"Bohol\": X_" +
             std::to_string(batch) + ", \"Davao\": Y_" + std::to_string(batch) + ", \"ImprovedBicol\": Z_" +
             std::to_string(batch) + "}]\n";
    case Method::Description:
      return opening +
             "Task: For each target product, provide a discrete distribution over the premium (additional "
             "PHP over 44) you would be willing to pay to exchange for it.\n\n"
             "INSTRUCTIONS:\n"
             "1. First, explain your reasoning. Consider the chocolate item descriptions (and examples if "
             "we provided).\n"
             "2. Second, for each product, output exactly 5 most likely premium values. The 5 values must "
             "include 0 (meaning you would not exchange), and each premium value must be between 0 and "
             "100. Also, output the probability for each of the 5 values. Probabilities must be "
             "non-negative and sum to 1 for each product. Please avoid identical distributions across the "
             "three products unless strongly justified.\n\n"
             "Output Format: Reasoning: [...] Final Answer: [\n"
             "{\n"
             "  \"premium_support\": {\n"
             "    \"Bohol\": [v1, v2, ..., v5],\n"
             "    \"Davao\": [v1, v2, ..., v5],\n"
             "    \"ImprovedBicol\": [v1, v2, ..., v5]\n"
             "  },\n"
             "  \"probabilities\": {\n"
             "    \"Bohol\": [p1, p2, ..., p5],\n"
             "    \"Davao\": [p1, p2, ..., p5],\n"
             "    \"ImprovedBicol\": [p1, p2, ..., p5]\n"
             "  }\n"
             "}\n"
             "]\n";
  }
  throw ConfigError("unknown method");
}

inline std::string newsvendor_prompt(const PromptContext& ctx) {
  if (ctx.reference_items.empty()) throw MissingContext("newsvendor prompts need reference items");
  if (ctx.target_item.empty()) throw MissingContext("newsvendor prompts need a target item");
  std::string out =
      "You are an expert in inventory demand forecasting. Use the provided reference items to estimate "
      "statistics for the Target Item.\n\n"
      "Context (" +
      std::to_string(ctx.reference_items.size()) + " Reference Items with known Demand Statistics):\n";
  for (std::size_t i = 0; i < ctx.reference_items.size(); ++i) {
    out += "[Reference Item " + std::to_string(i + 1) + "]\n" + ctx.reference_items[i] + "\n";
    out += "------------------------------\n";
  }
  out +=
      "\nTarget Item Task:\n"
      "Please estimate the demand distribution for:\n" +
      ctx.target_item +
      "\n"
      "Task: Estimate the underlying Normal distribution parameters for the Target Item.\n\n"
      "STRICT OUTPUT FORMAT:\n"
      "You must start your response with exactly this line:\n"
      "PREDICTION -> Mean: [Value], Std: [Value]\n\n"
      "Then, on a new line, provide your:\n"
      "REASONING -> [Your detailed explanation here]\n";
  return out;
}

}  // namespace detail

/// Byte-stable prompt rendering: the same arguments always produce the same
/// message bytes.
inline std::vector<Message> build_prompt(Problem problem, Method method, bool few_shot,
                                         const PromptContext& ctx) {
  std::string content;
  if (problem == Problem::Newsvendor) {
    if (method != Method::Description)
      throw ConfigError("newsvendor generation supports only the Description method");
    content = detail::newsvendor_prompt(ctx);
    return {{"user", content}};
  }

  content = (problem == Problem::Assortment) ? detail::sushi_background(ctx.item_descriptions)
                                             : detail::chocolate_background();
  if (few_shot) content += detail::few_shot_block(ctx.example_decisions);
  if (method == Method::PersonaSampling) content += detail::persona_block(ctx.persona);
  content += (problem == Problem::Assortment) ? detail::assortment_task(method, ctx)
                                              : detail::pricing_task(method, ctx);
  return {{"user", content}};
}

}  // namespace crscore
