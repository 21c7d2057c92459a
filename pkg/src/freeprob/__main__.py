from freeprob.cli import main

main()
