"""privad core: game model, posteriors, pricing, equilibria, metrics, oracle"""
