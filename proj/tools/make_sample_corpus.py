#!/usr/bin/env python3
"""Writes the bundled desk-scale sample corpus under data/sample/.

Output is deterministic: dialogues.jsonl (20 dialogues, 10 per domain),
scenarios.jsonl (one scenario per dialogue) and ratings.jsonl (two quality
raters per dialogue; two dialogues carry a sub-3 mean criterion).
"""

import argparse
import json
import pathlib
import random

CRITERIA = ["EI", "SA", "IN", "F", "C", "N", "I"]

JOB = {
    "domain": "job_interview",
    "scenarios": [
        "A software company is hiring a project manager. The candidate wants a higher salary, a company car and remote Fridays, while the employer has a fixed budget and prefers office presence.",
        "A hospital is recruiting a senior nurse for night shifts. The candidate asks for a shift premium and paid training, while the manager worries about staffing costs this quarter.",
        "A retail chain offers a store manager position. The applicant wants a faster promotion track and extra vacation days, and the regional director must keep parity with other stores.",
        "A design studio is hiring a lead illustrator. The candidate wants full remote work and a signing bonus, while the studio values in-person collaboration during project launches.",
        "A logistics firm is hiring a data analyst. The candidate asks for a relocation package and flexible hours, while the hiring manager has a strict onboarding schedule to follow.",
        "A university lab offers a research engineer post. The candidate requests conference travel funding and a longer contract, while the lab depends on a grant that renews yearly.",
        "A bank is recruiting a compliance officer. The applicant wants a title upgrade and a salary above the posted range, and the bank must justify every exception to its committee.",
        "A startup is hiring its first sales lead. The candidate asks for equity and a guaranteed base salary, while the founders want pay tied mostly to commission this year.",
        "A school district is hiring a science teacher. The candidate requests a smaller class size and lab equipment funds, while the principal has a limited budget for the term.",
        "A restaurant group is hiring an executive chef. The candidate wants menu control and a profit share, while the owners want to keep the existing signature dishes unchanged.",
    ],
    "topics": ["salary", "company car", "workday length", "promotion track", "vacation days",
               "signing bonus", "remote work policy", "relocation package"],
    "user_lines": [
        "I am excited about this role, but the {t} you offered is lower than I hoped for.",
        "Honestly, I feel the {t} should reflect my experience better.",
        "I appreciate the offer, though I need more clarity on the {t} before I commit.",
        "That sounds reasonable, and I could accept if we settle the {t} as well.",
        "I am worried that the {t} will not work for my family situation.",
        "Thank you, this is moving in a good direction on the {t}.",
    ],
}

RES = {
    "domain": "resource_allocation",
    "scenarios": [
        "Two neighboring farms share one irrigation canal during a drought. The user wants more water days for orchards, while the agent manages the schedule for every farm downstream.",
        "A disaster relief team must split a shipment of tents and blankets. The user coordinates a shelter for families, and the agent must also supply a clinic and a school.",
        "A city council divides a small parks budget. The user wants a new playground, while the agent must cover maintenance for existing parks and public safety lighting.",
        "Three research groups share one microscope. The user needs long overnight sessions, while the agent schedules the instrument fairly and plans a maintenance window.",
        "A food bank allocates fresh produce among pantries. The user runs a large urban pantry, and the agent must keep deliveries balanced across rural sites with less storage.",
        "A company splits its annual training budget between teams. The user leads engineering and wants certifications, while the agent must fund onboarding for new hires first.",
        "Volunteers divide shifts at a community kitchen. The user wants weekday evenings only, while the agent needs coverage for weekend mornings when demand is highest.",
        "A hospital allocates ventilators across wards during a surge. The user manages the intensive care ward, while the agent must hold reserve units for emergency transfers.",
        "Two departments share one delivery van. The user needs it for client visits, while the agent must also schedule supply logistics for the warehouse every morning.",
        "A housing cooperative divides storage units among members. The user asks for two units, while the agent must honor a waiting list of members without any storage.",
    ],
    "topics": ["water schedule", "shipment split", "budget share", "time slots", "delivery plan",
               "reserve units", "shift coverage", "storage allocation"],
    "user_lines": [
        "We really need a bigger share of the {t}, our people are counting on it.",
        "I feel the current {t} ignores how much demand we actually have.",
        "I am glad we are talking, and I trust we can improve the {t} together.",
        "That helps, although the {t} still leaves us short during peak days.",
        "This is frustrating because the {t} changed without any warning.",
        "Thanks, I think the revised {t} could work for both of us.",
    ],
}

# (emotion, strategy) pairings with matching component texts.
MOVES = [
    ("anxiety", "escalate assurance",
     "doubts about whether the {t} will be honored",
     "the arrangement might fall through",
     "Concrete commitments on the {t} would settle the uncertainty.",
     "Written guarantees can turn an uncertain promise into a dependable plan.",
     "reduce the user's uncertainty, the agent uses escalate assurance by committing to specific terms"),
    ("frustration", "emotion diffusion",
     "a change in the {t} that felt sudden and unfair",
     "the process has been careless about their needs",
     "The sudden change may reflect pressure elsewhere rather than disregard.",
     "Setbacks in a negotiation can be resolved when both sides slow down and listen.",
     "lower the tension, the agent uses emotion diffusion with calm and steady language"),
    ("disappointment", "cognitive reappraisal",
     "an offer on the {t} that falls below expectations",
     "their value is not being recognized",
     "A lower first offer can be an opening for a package that fits better overall.",
     "An initial gap can become useful feedback for shaping a better agreement.",
     "reframe the gap as useful information, the agent uses cognitive reappraisal"),
    ("joy", "savoring",
     "progress on the {t} that matches what they hoped for",
     "the conversation is going well",
     "Shared wins build momentum for the remaining open points.",
     "Celebrating each agreed point makes the next one easier.",
     "keep the constructive climate, the agent uses savoring of the shared progress"),
    ("confidence", "positive reinforcement",
     "their strong preparation for the discussion about the {t}",
     "they bring a solid case to the table",
     "Their preparation gives both sides a clear starting point.",
     "Clear expectations are a strength that speeds up agreement.",
     "acknowledge the user's constructive approach, the agent uses positive reinforcement"),
    ("trust", "problem solving",
     "the open exchange about the {t}",
     "both sides are acting in good faith",
     "Good faith makes it possible to look for options that serve both needs.",
     "A joint search for options usually finds more value than a tug of war.",
     "craft an option that meets both needs, the agent uses problem solving"),
    ("neutral", "active listening",
     "a factual question about the {t}",
     "more details would help them decide",
     "Restating their needs accurately shows they have been heard.",
     "Being understood is the first step toward a workable deal.",
     "show that the user's needs are understood, the agent uses active listening"),
    ("gratitude", "expressing optimism",
     "the agent's willingness to revisit the {t}",
     "the agent is treating them fairly",
     "Their appreciation signals readiness to close the remaining gaps.",
     "A hopeful outlook helps both sides commit to a final agreement.",
     "encourage a final cooperative push, the agent uses expressing optimism about the outcome"),
    ("anger", "expressive suppression",
     "the refusal to discuss the {t} earlier",
     "their concerns were dismissed",
     "Staying composed keeps the door open even when the moment feels tense.",
     "Composure protects the relationship while the facts are sorted out.",
     "avoid escalating a tense moment, the agent uses expressive suppression and a measured tone"),
    ("fear", "perspective-taking",
     "uncertainty about how the {t} affects their future",
     "they might lose something important",
     "Their caution makes sense given what is at stake for them.",
     "Seeing the situation through their eyes points to the safeguards they need.",
     "address the user's underlying concern, the agent uses perspective-taking"),
    ("positivity", "positive framing",
     "a proposal on the {t} that opens new possibilities",
     "there is room for a good outcome",
     "Focusing on what can be gained keeps both sides collaborative.",
     "Gains framed clearly motivate both sides more than avoided losses.",
     "turn attention toward achievable gains, the agent uses positive framing"),
    ("surprise", "no strategy",
     "an unexpected detail about the {t}",
     "the facts need to be confirmed",
     "A plain confirmation of the details is what helps most right now.",
     "Clear facts remove confusion without any need for emotional framing.",
     "give the user the facts they asked for, the agent uses no strategy and answers plainly"),
]

RESPONSES = {
    "escalate assurance": "I understand the uncertainty. We can put the agreed {t} in writing today so nothing changes later.",
    "emotion diffusion": "I hear that this felt sudden. Let us take it step by step and fix the {t} together.",
    "cognitive reappraisal": "I see why the first number disappoints. Let us use it as a starting point and shape a better {t}.",
    "savoring": "It is great that we agree on this part. Let us build on it for the {t}.",
    "positive reinforcement": "Thank you for coming so well prepared. Your proposal on the {t} makes this easier.",
    "problem solving": "Let us list what each side needs and design a {t} that covers both.",
    "active listening": "So what matters most is a clear {t} that fits your situation. Did I get that right?",
    "expressing optimism": "I am confident we can close this. The {t} is almost where we both want it.",
    "expressive suppression": "I understand. Let us look at the facts on the {t} calmly and find a way forward.",
    "perspective-taking": "If I were in your position I would want safeguards too. We can add them to the {t}.",
    "positive framing": "This {t} gives you more flexibility than before, and we can grow it over time.",
    "no strategy": "Yes, that detail is correct. The {t} stays as described in the proposal.",
}


def rationale(move, topic):
    em, ss, trig, assess, ps, mt, sr = move
    response = RESPONSES[ss].format(t=topic)
    return {
        "emotion": em,
        "trigger": trig.format(t=topic) + ".",
        "assessment": assess.format(t=topic) + ".",
        "perspective_shift": ps.format(t=topic),
        "mindset_transformation": mt.format(t=topic),
        "strategy": ss,
        "strategy_reason": sr + ".",
        "response": response,
    }


def dialogue(idx, domain, scenario, rng):
    topics = rng.sample(domain["topics"], 3)
    turns = []
    for topic in topics:
        move = rng.choice(MOVES)
        line = rng.choice(domain["user_lines"]).format(t=topic)
        r = rationale(move, topic)
        turns.append({"speaker": "user", "utterance": line, "emotion": r["emotion"], "rationale": None})
        turns.append({"speaker": "agent", "utterance": r["response"], "emotion": None, "rationale": r})
    return {
        "id": f"sample-{idx:03d}",
        "scenario": scenario,
        "domain_tag": domain["domain"],
        "turns": turns,
        "quality_ratings": {},
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "sample"))
    parser.add_argument("--seed", type=int, default=20240)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    dialogues, scenarios, ratings = [], [], []
    idx = 1
    for domain in (JOB, RES):
        for text in domain["scenarios"]:
            d = dialogue(idx, domain, text, rng)
            dialogues.append(d)
            scenarios.append({"id": f"scn-{d['id']}", "text": text, "domain_tag": domain["domain"],
                              "provenance": "seeded"})
            low = idx in (10, 20)
            for rater in ("rater-a", "rater-b"):
                scores = {c: rng.choice([4, 5]) for c in CRITERIA}
                if low:
                    scores["C"] = 2 if rater == "rater-a" else 3
                ratings.append({"dialogue_id": d["id"], "rater_id": rater, "scores": scores})
            idx += 1

    def write(name, docs):
        with open(out / name, "w", encoding="utf-8") as f:
            for doc in docs:
                f.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")

    write("dialogues.jsonl", dialogues)
    write("scenarios.jsonl", scenarios)
    write("ratings.jsonl", ratings)


if __name__ == "__main__":
    main()
