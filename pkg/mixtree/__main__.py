from mixtree.cli import main

main()
