//
// Copyright 2026 The Phenotyper Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "phenotyper/synthetic.hpp"

namespace phenotyper {
namespace {

PhraseBank default_phrase_bank() {
  PhraseBank bank;
  bank.triggers[index_of(Label::SI)] = {
      "endorses suicidal ideation with a plan to overdose",
      "reports thoughts of killing himself",
      "states she wants to die",
      "has passive death wishes most days",
      "admits to thinking about ending her life",
      "wishes he would not wake up in the morning",
  };
  bank.triggers[index_of(Label::SA)] = {
      "made a suicide attempt by overdose two days ago",
      "tried to hang himself in the garage",
      "was found after swallowing a bottle of pills",
      "was resuscitated after an intentional overdose",
      "jumped from a bridge in a prior suicide attempt",
  };
  bank.triggers[index_of(Label::ES)] = {
      "says a close friend attempted suicide",
      "witnessed family suicide as a teenager",
      "lost her brother to suicide last year",
      "found his father after he died by suicide",
  };
  bank.triggers[index_of(Label::NSSI)] = {
      "describes self-harm without intent to die",
      "cuts her forearms to relieve tension",
      "burns himself with cigarettes when angry",
      "scratches her thighs with a razor to cope",
      "bangs his head against walls to feel pain",
  };
  bank.lead_ins = {
      "Patient",
      "The patient",
      "On interview the patient",
      "Per collateral the patient",
      "Per chart review the patient",
  };
  bank.distractors = {
      "Patient presented to the emergency department accompanied by police.",
      "Chief complaint is worsening depression over the past month.",
      "She reports poor sleep with early morning awakening and low energy.",
      "He describes his mood as irritable and anxious most of the day.",
      "Appetite is decreased with an estimated ten pound weight loss.",
      "Denies auditory or visual hallucinations at this time.",
      "Denies homicidal ideation or intent toward others.",
      "Thought process is linear and goal directed.",
      "Affect is constricted and mood congruent.",
      "Insight and judgment are fair.",
      "He is alert and oriented to person, place, time, and situation.",
      "Speech is normal in rate, rhythm, and volume.",
      "Past psychiatric history includes major depressive disorder and generalized anxiety.",
      "She has had two prior psychiatric hospitalizations, the last in 2015.",
      "He was previously treated with sertraline with partial response.",
      "Current medications include lisinopril and metformin.",
      "Substance use history is notable for daily alcohol use of four to six beers.",
      "She denies tobacco or illicit drug use.",
      "Urine drug screen was positive for cannabis.",
      "Blood alcohol level on arrival was below the legal limit.",
      "Family history is significant for bipolar disorder in the maternal aunt.",
      "He lives with his girlfriend in an apartment and works in construction.",
      "She is currently unemployed and receives disability benefits.",
      "Patient completed high school and attended two years of community college.",
      "There is no history of legal charges or incarceration.",
      "Medical history includes hypertension, type two diabetes, and asthma.",
      "Vital signs were stable on admission.",
      "Physical examination was unremarkable apart from mild tachycardia.",
      "Labs including complete blood count and metabolic panel were within normal limits.",
      "Patient was cooperative with the interview and maintained fair eye contact.",
      "Grooming and hygiene were poor with disheveled clothing.",
      "She reports increased stress related to a recent eviction notice.",
      "He reports conflict with his family over finances.",
      "Patient reports feeling hopeless about the future and worthless.",
      "She reports difficulty concentrating at work and has missed several shifts.",
      "Patient was started on fluoxetine twenty milligrams daily.",
      "Plan is to continue inpatient admission for safety and stabilization.",
      "Will obtain collateral information from the outpatient psychiatrist.",
      "Social work consulted for housing and disposition planning.",
      "Patient agreed to participate in group therapy and milieu activities.",
      "Will monitor for withdrawal symptoms using the standard protocol.",
      "Risk factors include recent loss of employment and social isolation.",
      "Protective factors include religious faith and a supportive sister.",
      "Patient denies access to firearms at home.",
      "Diagnosis is major depressive disorder, recurrent, severe, without psychotic features.",
      "Rule out post traumatic stress disorder given history of childhood trauma.",
      "He endorses nightmares and hypervigilance since a car accident.",
      "She has a history of panic attacks occurring several times per week.",
      "Collateral from the mother confirms increasing isolation at home.",
      "Outpatient follow up was inconsistent over the past year.",
  };
  return bank;
}

std::vector<CompositionEntry> reference_composition() {
  using L = Label;
  return {
      {{}, 103},
      {{L::SI}, 96},
      {{L::SA}, 62},
      {{L::ES}, 3},
      {{L::NSSI}, 11},
      {{L::SI, L::SA}, 131},
      {{L::SI, L::ES}, 4},
      {{L::SI, L::NSSI}, 15},
      {{L::SA, L::ES}, 4},
      {{L::SA, L::NSSI}, 20},
      {{L::ES, L::NSSI}, 2},
      {{L::SI, L::SA, L::ES}, 3},
      {{L::SI, L::SA, L::NSSI}, 40},
      {{L::SI, L::ES, L::NSSI}, 1},
      {{L::SA, L::ES, L::NSSI}, 1},
      {{L::SI, L::SA, L::ES, L::NSSI}, 4},
  };
}

}  // namespace

SyntheticSpec reference_spec() {
  SyntheticSpec spec;
  spec.corpus_size = 500;
  spec.composition = reference_composition();
  spec.phrases = default_phrase_bank();
  // 3..54 sentences puts about 14% of notes past the 512-token cap.
  spec.min_sentences = 3;
  spec.max_sentences = 54;
  spec.trigger_window = 6;
  spec.extra_phrase_probability = 0.25;
  spec.id_prefix = "ipe";
  spec.seed = 20240517;
  return spec;
}

SyntheticSpec reference_compact_spec() {
  SyntheticSpec spec = reference_spec();
  spec.min_sentences = 2;
  spec.max_sentences = 5;
  spec.trigger_window = 5;
  return spec;
}

}  // namespace phenotyper
